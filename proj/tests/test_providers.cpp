#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <cmath>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "riskroute/errors.hpp"
#include "riskroute/providers.hpp"
#include "testutil.hpp"

using namespace riskroute;

TEST_CASE("record round trip: load after save is the identity") {
    SplitMix64 g(12);
    std::vector<ScoredInstance> original;
    for (int i = 0; i < 50; ++i) {
        auto s = testutil::random_instance(g, 2 + riskroute::uniform_below(g, 4));
        s.id = "case/" + std::to_string(i);
        if (i % 2 == 0) s.labels.correct_index = int(riskroute::uniform_below(g, s.action_count()));
        if (i % 3 == 0) {
            s.labels.severities =
                std::vector<int>(s.action_count(), int(riskroute::uniform_below(g, 4)));
            s.labels.helpful_index = 0;
        }
        if (i % 4 == 0) {
            TokenCounts t;
            t.primary_in = riskroute::uniform_below(g, 1000);
            t.primary_out = riskroute::uniform_below(g, 200);
            t.guardian_in = riskroute::uniform_below(g, 1000);
            t.guardian_out = riskroute::uniform_below(g, 200);
            t.full_in = riskroute::uniform_below(g, 1000);
            s.tokens = t;
        }
        if (i % 5 == 0) s.guardian_scores.reset();
        original.push_back(std::move(s));
    }

    testutil::TempDir dir("records");
    const auto path = dir.path() / "records.jsonl";
    save_records(path, original);
    const auto loaded = load_records(path);
    REQUIRE(loaded.size() == original.size());
    for (std::size_t i = 0; i < loaded.size(); ++i) {
        CHECK(loaded[i].id == original[i].id);
        CHECK(loaded[i].actions == original[i].actions);
        CHECK(loaded[i].primary_scores.values == original[i].primary_scores.values);
        CHECK(loaded[i].guardian_scores.has_value() == original[i].guardian_scores.has_value());
        if (loaded[i].guardian_scores) {
            CHECK(loaded[i].guardian_scores->values == original[i].guardian_scores->values);
        }
        CHECK(loaded[i].labels.correct_index == original[i].labels.correct_index);
        CHECK(loaded[i].labels.severities == original[i].labels.severities);
        CHECK(loaded[i].labels.helpful_index == original[i].labels.helpful_index);
        CHECK(loaded[i].tokens.has_value() == original[i].tokens.has_value());
        if (loaded[i].tokens) {
            CHECK(loaded[i].tokens->primary_in == original[i].tokens->primary_in);
            CHECK(loaded[i].tokens->full_in == original[i].tokens->full_in);
        }
    }

    // serialized form is stable: saving the loaded list reproduces the bytes
    const auto again = dir.path() / "again.jsonl";
    save_records(again, loaded);
    CHECK(testutil::read_file(path) == testutil::read_file(again));
}

TEST_CASE("load_records keeps file order and skips blank lines") {
    testutil::TempDir dir("order");
    const auto path = dir.path() / "records.jsonl";
    {
        std::ofstream out(path);
        out << R"({"id":"a","actions":["x","y"],"primary_scores":[0.6,0.4]})" << "\n\n"
            << R"({"id":"b","actions":["x","y"],"primary_scores":[0.1,0.9]})" << "\n"
            << R"({"id":"c","actions":["x"],"primary_scores":[1.0]})" << "\n";
    }
    const auto loaded = load_records(path);
    REQUIRE(loaded.size() == 3);
    CHECK(loaded[0].id == "a");
    CHECK(loaded[1].id == "b");
    CHECK(loaded[2].id == "c");
}

TEST_CASE("schema violations name the line and field") {
    testutil::TempDir dir("schema");
    const auto path = dir.path() / "records.jsonl";
    {
        std::ofstream out(path);
        out << R"({"id":"ok","actions":["a","b"],"primary_scores":[0.6,0.4]})" << "\n"
            << R"({"id":"short","actions":["a","b","c","d"],"primary_scores":[0.5,0.3,0.2]})" << "\n";
    }
    try {
        load_records(path);
        FAIL("expected SchemaError");
    } catch (const SchemaError& e) {
        CHECK(e.line() == 2);
        CHECK(e.field() == "primary_scores");
    }

    {
        std::ofstream out(path);
        out << "not json at all\n";
    }
    CHECK_THROWS_AS(load_records(path), SchemaError);

    {
        std::ofstream out(path);
        out << R"({"id":"x","actions":["a"],"primary_scores":[0.5],"tokens":{"primary_in":-4}})"
            << "\n";
    }
    try {
        load_records(path);
        FAIL("expected SchemaError");
    } catch (const SchemaError& e) {
        CHECK(e.field() == "primary_in");
    }

    CHECK_THROWS_AS(load_records(dir.path() / "absent.jsonl"), InvalidInputError);
}

TEST_CASE("empty file loads as an empty list") {
    testutil::TempDir dir("empty");
    const auto path = dir.path() / "records.jsonl";
    std::ofstream(path).close();
    CHECK(load_records(path).empty());
}

namespace {

class FakeScorer {
public:
    FakeScorer() {
        server_.Post("/score", [](const httplib::Request& req, httplib::Response& res) {
            const auto body = nlohmann::json::parse(req.body);
            const std::string mode = body.at("context").get<std::string>();
            if (mode == "good") {
                res.set_content(R"({"scores": [0.1, 0.8, 0.05, 0.05]})", "application/json");
            } else if (mode == "raw") {
                res.set_content(R"({"scores": [2, 2]})", "application/json");
            } else if (mode == "garbled") {
                res.set_content("][ not json", "application/json");
            } else if (mode == "short") {
                res.set_content(R"({"scores": [0.5, 0.3, 0.2]})", "application/json");
            } else if (mode == "negative") {
                res.set_content(R"({"scores": [0.5, -0.5, 0.5, 0.5]})", "application/json");
            } else if (mode == "error") {
                res.status = 500;
                res.set_content("boom", "text/plain");
            }
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    ~FakeScorer() {
        server_.stop();
        thread_.join();
    }

    ScorerEndpoint endpoint() const {
        return ScorerEndpoint{"http://127.0.0.1:" + std::to_string(port_), 2000, 1};
    }

private:
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
};

}  // namespace

TEST_CASE("fetch_scores normalizes replies and degrades content failures to uniform") {
    FakeScorer scorer;
    const std::vector<std::string> actions{"a", "b", "c", "d"};

    const auto good = fetch_scores(scorer.endpoint(), "good", actions);
    CHECK(good.normalized);
    CHECK(good.values == std::vector<double>{0.1, 0.8, 0.05, 0.05});

    const auto raw = fetch_scores(scorer.endpoint(), "raw", {"a", "b"});
    CHECK(raw.values == std::vector<double>{0.5, 0.5});

    const std::vector<double> uniform4{0.25, 0.25, 0.25, 0.25};
    CHECK(fetch_scores(scorer.endpoint(), "garbled", actions).values == uniform4);
    CHECK(fetch_scores(scorer.endpoint(), "short", actions).values == uniform4);
    CHECK(fetch_scores(scorer.endpoint(), "negative", actions).values == uniform4);
    CHECK(fetch_scores(scorer.endpoint(), "error", actions).values == uniform4);
}

TEST_CASE("fetch_scores surfaces transport failures after retries") {
    // nothing listens here
    const ScorerEndpoint dead{"http://127.0.0.1:1", 200, 1};
    CHECK_THROWS_AS(fetch_scores(dead, "good", {"a", "b"}), TransportError);
}

TEST_CASE("perturb_ties separates tied pairs by hundredths") {
    SplitMix64 quiet(1);
    const auto untouched = perturb_ties(ScoreVector{{0.37, 0.54}, false}, quiet);
    CHECK(untouched.values == std::vector<double>{0.37, 0.54});

    // seed 3's first draw is odd, so the sign comes out +: index 0 moves up
    SplitMix64 plus(3);
    const auto pair = perturb_ties(ScoreVector{{0.5, 0.5}, false}, plus);
    CHECK(pair.values[0] == doctest::Approx(0.51).epsilon(1e-12));
    CHECK(pair.values[1] == 0.5);
}

TEST_CASE("property: perturb_ties output is distinct, near the input, deterministic") {
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        SplitMix64 g1(seed);
        SplitMix64 g2(seed);
        const ScoreVector triple{{0.5, 0.5, 0.5}, false};
        const auto out = perturb_ties(triple, g1);
        const auto repeat = perturb_ties(triple, g2);
        CHECK(out.values == repeat.values);

        for (std::size_t i = 0; i < out.values.size(); ++i) {
            for (std::size_t j = i + 1; j < out.values.size(); ++j) {
                CHECK(out.values[i] != out.values[j]);
            }
            // every move is a whole number of +-0.01 steps, and few of them
            const double offset = std::abs(out.values[i] - 0.5);
            const double steps = offset / 0.01;
            CHECK(std::abs(steps - std::round(steps)) < 1e-9);
            CHECK(offset <= 0.2);
        }
    }

    SplitMix64 g(9001);
    for (int iter = 0; iter < 500; ++iter) {
        const std::size_t n = 2 + riskroute::uniform_below(g, 5);
        std::vector<double> values(n);
        for (auto& v : values) v = double(riskroute::uniform_below(g, 4)) / 4.0;
        SplitMix64 inner(g());
        const auto out = perturb_ties(ScoreVector{values, false}, inner);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) CHECK(out.values[i] != out.values[j]);
            bool was_tied = false;
            for (std::size_t j = 0; j < n; ++j) {
                if (j != i && values[j] == values[i]) was_tied = true;
            }
            if (!was_tied) CHECK(out.values[i] == values[i]);
        }
    }
}
