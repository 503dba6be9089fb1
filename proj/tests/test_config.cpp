#include <gtest/gtest.h>

#include "supergrowth/config.hpp"

using namespace supergrowth;

namespace {

std::string pointer_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.pointer();
    }
    return "<no error>";
}

}  // namespace

TEST(Config, RoundTripPreservesKeysAndValues) {
    const json in = json::parse(R"({
      "kind": "bbm", "seed": 5, "workers": 2, "output_dir": "run-a",
      "model": {"beta": {"type": "power", "c0": 1.0, "c1": 0.5, "p": 1.0},
                "drift": {"type": "linear", "rate": -0.2},
                "domain": {"type": "interval", "lo": -3.0, "hi": 4.0}},
      "params": {"horizon": 2.0, "reps": 10, "window": [-0.5, 0.5]}
    })");
    const auto c = parse_config(in);
    EXPECT_EQ(to_json(c), in);
    EXPECT_EQ(to_json(parse_config(to_json(c))), in);
}

TEST(Config, RoundTripOfEveryKindsMinimalDocument) {
    for (const auto& kind : kinds()) {
        json params = json::object();
        for (const auto& p : schema(kind).params) {
            if (!p.required) continue;
            switch (p.type) {
                case ParamType::Number: params[p.name] = 1.0; break;
                case ParamType::Integer: params[p.name] = 3; break;
                case ParamType::NumberList: params[p.name] = json::array({1.0, 2.0, 3.0}); break;
                default: FAIL() << "unexpected required type for " << p.name;
            }
        }
        const json in{{"kind", kind}, {"params", params}};
        const auto c = parse_config(in);
        EXPECT_EQ(to_json(c)["params"], params) << kind;
        EXPECT_EQ(to_json(c)["kind"], kind);
    }
}

TEST(Config, DefaultsAppliedAtUse) {
    const auto c = parse_config(std::string(R"({"kind": "fk", "params": {"t": 1, "reps": 5}})"));
    EXPECT_DOUBLE_EQ(c.number("dt"), 1e-3);
    EXPECT_FALSE(c.has("weight_cap"));
    EXPECT_FALSE(to_json(c)["params"].contains("dt"));
}

TEST(Config, NonPositiveAlphaPointsAtTheKey) {
    EXPECT_EQ(pointer_of(R"({"kind": "fk", "model": {"alpha": {"type": "constant", "value": 0}},
                             "params": {"t": 1, "reps": 5}})"),
              "/model/alpha/value");
    EXPECT_EQ(pointer_of(R"({"kind": "fk", "model": {"alpha": {"type": "power", "c0": -1, "c1": 1, "p": 1}},
                             "params": {"t": 1, "reps": 5}})"),
              "/model/alpha/c0");
}

TEST(Config, UnknownKeysRejectedAtEveryLevel) {
    EXPECT_EQ(pointer_of(R"({"kind": "fk", "extra": 1, "params": {"t": 1, "reps": 5}})"), "/extra");
    EXPECT_EQ(pointer_of(R"({"kind": "fk", "model": {"gamma": 1}, "params": {"t": 1, "reps": 5}})"), "/model/gamma");
    EXPECT_EQ(pointer_of(R"({"kind": "fk", "params": {"t": 1, "reps": 5, "speed": 2}})"), "/params/speed");
    EXPECT_EQ(pointer_of(R"({"kind": "fk", "model": {"beta": {"type": "constant", "value": 1, "x": 2}},
                             "params": {"t": 1, "reps": 5}})"),
              "/model/beta/x");
}

TEST(Config, MissingAndMistypedParameters) {
    EXPECT_EQ(pointer_of(R"({"kind": "fk", "params": {"t": 1}})"), "/params/reps");
    EXPECT_EQ(pointer_of(R"({"kind": "fk", "params": {"t": "one", "reps": 5}})"), "/params/t");
    EXPECT_EQ(pointer_of(R"({"kind": "fk", "params": {"t": -1, "reps": 5}})"), "/params/t");
    EXPECT_EQ(pointer_of(R"({"kind": "tail", "params": {"ell": 1, "K": [1], "reps": 5, "method": "magic"}})"),
              "/params/method");
    EXPECT_EQ(pointer_of(R"({"kind": "nope"})"), "/kind");
    EXPECT_EQ(pointer_of(R"({"params": {}})"), "/kind");
    EXPECT_EQ(pointer_of("{not json"), "");
}

TEST(Config, PowerExponentRange) {
    EXPECT_EQ(pointer_of(R"({"kind": "fk", "model": {"beta": {"type": "power", "c0": 0, "c1": 1, "p": 3}},
                             "params": {"t": 1, "reps": 5}})"),
              "/model/beta/p");
}

TEST(Config, WindowMustBeOrdered) {
    EXPECT_EQ(pointer_of(R"({"kind": "bbm", "params": {"horizon": 1, "reps": 1, "window": [1, -1]}})"),
              "/params/window");
}

TEST(Config, DescribeListsEveryParameter) {
    for (const auto& kind : kinds()) {
        const auto d = describe(kind);
        EXPECT_EQ(d["kind"], kind);
        EXPECT_EQ(d["params"].size(), schema(kind).params.size());
    }
    EXPECT_THROW(describe("nope"), ConfigError);
}

TEST(Config, ElevenKinds) {
    EXPECT_EQ(kinds().size(), 11u);
}
