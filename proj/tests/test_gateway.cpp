#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <random>
#include <set>
#include <thread>

#include "sciprep/gateway.hpp"
#include "sciprep/parsers.hpp"
#include "sciprep/prompts.hpp"

using namespace sciprep;

namespace {

// Sample pair from the correction appendix: extraction artifacts on the left,
// the expected cleaned opening on the right.
const char* kRawFixture =
    "Highly p e n e t r a t i n g radiation, such as $\\gamma$-rays or fast electorns, "
    "deposits ener gy\n\nthroughout the solid t a r g e t material.";
const char* kCorrectedFixture =
    "Highly penetrating radiation, such as $\\gamma$-rays or fast electrons, deposits energy "
    "throughout the solid target material.";

const char* kRatingFixture =
    "Explanation:\n"
    "\n"
    "The instruction is clear and specific, asking the model to extract a table from a given "
    "paragraph. The paragraph itself is well-written, with proper grammar and syntax, making "
    "it easy to understand. However, the complexity of the task is relatively low.\n"
    "\n"
    "====================\n"
    "\n"
    "{\n"
    "\n"
    "\"Clarity\": 5,\n"
    "\n"
    "\"Complexity\": 2,\n"
    "\n"
    "\"Correctness\": 5,\n"
    "\n"
    "\"Usefulness\": 4,\n"
    "\n"
    "\"Adaptability\": 4,\n"
    "\n"
    "\"Total\": 20\n"
    "\n"
    "}\n";

// Fails with transient errors a fixed number of times, then delegates.
class FlakyBackend final : public Backend {
public:
    FlakyBackend(std::shared_ptr<Backend> inner, int failures)
        : inner_(std::move(inner)), failures_left_(failures) {}

    CompletionResponse complete(const CompletionRequest& request) override {
        if (failures_left_-- > 0) throw BackendError("injected fault", /*transient=*/true);
        return inner_->complete(request);
    }
    std::string id() const override { return "flaky"; }

    std::shared_ptr<Backend> inner_;
    std::atomic<int> failures_left_;
};

GatewayPolicy fast_policy(int retries = 3, int in_flight = 4) {
    GatewayPolicy p;
    p.max_retries = retries;
    p.backoff_initial_ms = 1;
    p.max_in_flight = in_flight;
    return p;
}

} // namespace

TEST_SUITE_BEGIN("gateway");

TEST_CASE("correction prompt embeds the raw text and ends with the preamble instruction") {
    const std::string prompt = render_prompt(TemplateId::correction, {{"RawText", "abc"}});
    CHECK(prompt.find("Raw Text:\n\nabc") != std::string::npos);
    const std::string closing =
        "Start your response with \"Here is the corrected version of the text:\".";
    REQUIRE(prompt.size() >= closing.size());
    CHECK(prompt.substr(prompt.size() - closing.size()) == closing);
}

TEST_CASE("generation prompt carries all twenty keywords in the slot") {
    std::string joined;
    std::vector<std::string> keywords;
    for (int i = 0; i < 20; ++i) {
        keywords.push_back("kw" + std::to_string(i));
        joined += (i ? ", " : "") + keywords.back();
    }
    const std::string prompt = render_prompt(TemplateId::generation, {{"keywords", joined}});
    for (const auto& kw : keywords) CHECK(prompt.find(kw) != std::string::npos);
    // literal braces in the body survive rendering
    CHECK(prompt.find("Use {{ and }} to warp your output") != std::string::npos);
}

TEST_CASE("empty binding is a template error naming the placeholder") {
    CHECK_THROWS_WITH_AS(render_prompt(TemplateId::cpt_label, {{"Extract", ""}}),
                         doctest::Contains("Extract"), DataError);
    CHECK_THROWS_WITH_AS(render_prompt(TemplateId::correction, {}),
                         doctest::Contains("RawText"), DataError);
}

TEST_CASE("render is injective over distinct binding values") {
    std::mt19937_64 rng(11);
    std::set<std::string> prompts;
    std::set<std::string> values;
    for (int i = 0; i < 200; ++i) {
        std::string value = "v" + std::to_string(rng());
        if (!values.insert(value).second) continue;
        prompts.insert(render_prompt(TemplateId::correction, {{"RawText", value}}));
    }
    CHECK(prompts.size() == values.size());
}

TEST_CASE("parse_correction strips the preamble") {
    const std::string response =
        std::string("Here is the corrected version of the text:\n\n") + kCorrectedFixture;
    const CorrectionParse parsed = parse_correction(response);
    CHECK(parsed.preamble_found);
    CHECK(parsed.text == kCorrectedFixture);
    CHECK(parsed.text.rfind("Highly penetrating radiation", 0) == 0);
}

TEST_CASE("parse_correction without preamble returns full text with warning") {
    const CorrectionParse parsed = parse_correction("  clean text \n");
    CHECK_FALSE(parsed.preamble_found);
    CHECK(parsed.text == "clean text");
}

TEST_CASE("parse_correction rejects preamble-only responses") {
    CHECK_THROWS_AS(parse_correction("Here is the corrected version of the text:\n\n  \n"),
                    DataError);
}

TEST_CASE("parse_educational_score reads the integer after the last marker") {
    CHECK(parse_educational_score(
              "The extract is coherent and instructive.\n\nEducational score: 3") == 3);
    CHECK(parse_educational_score("Educational score: 1 ... Educational score: 4") == 4);
    CHECK(parse_educational_score("Educational score:  5") == 5);
}

TEST_CASE("parse_educational_score range and marker errors") {
    CHECK_THROWS_WITH_AS(parse_educational_score("Educational score: 7"),
                         doctest::Contains("range"), DataError);
    CHECK_THROWS_WITH_AS(parse_educational_score("no marker here"),
                         doctest::Contains("marker"), DataError);
}

TEST_CASE("parse_generation extracts text and answer") {
    const GenerationParse g = parse_generation(R"({"text": "p", "answer": "a"})");
    CHECK(g.context == "p");
    CHECK(g.answer == "a");
}

TEST_CASE("code-fenced generation parses identically to unfenced") {
    const std::string inner = R"({"answer": "a1", "text": "t1"})";
    const GenerationParse plain = parse_generation(inner);
    const GenerationParse fenced = parse_generation("```json\n" + inner + "\n```");
    const GenerationParse bare_fence = parse_generation("```\n" + inner + "\n```");
    CHECK(plain.context == fenced.context);
    CHECK(plain.answer == fenced.answer);
    CHECK(plain.context == bare_fence.context);
    CHECK(plain.answer == bare_fence.answer);
}

TEST_CASE("generation schema and type errors") {
    CHECK_THROWS_WITH_AS(parse_generation(R"({"text": "p"})"), doctest::Contains("answer"),
                         DataError);
    CHECK_THROWS_WITH_AS(parse_generation(R"({"answer": 3, "text": "p"})"),
                         doctest::Contains("type error"), DataError);
    CHECK_THROWS_AS(parse_generation("no json at all"), DataError);
}

TEST_CASE("parse_rating reads the five aspects from the appendix-style block") {
    const AspectScores s = parse_rating(kRatingFixture);
    CHECK(s.clarity == 5);
    CHECK(s.complexity == 2);
    CHECK(s.correctness == 5);
    CHECK(s.usefulness == 4);
    CHECK(s.adaptability == 4);
    CHECK(s.total == 20);
    CHECK(s.average() == doctest::Approx(4.0));
    CHECK(s.explanation.rfind("The instruction is clear", 0) == 0);
}

TEST_CASE("inconsistent total is recomputed from the aspects") {
    std::string text = kRatingFixture;
    const auto pos = text.find("\"Total\": 20");
    text.replace(pos, 11, "\"Total\": 19");
    CHECK(parse_rating(text).total == 20);
}

TEST_CASE("all-zero rating is accepted") {
    AspectScores zeros;
    zeros.explanation = "none";
    const AspectScores parsed = parse_rating(format_rating(zeros));
    CHECK(parsed.total == 0);
    CHECK(parsed.average() == doctest::Approx(0.0));
}

TEST_CASE("rating parse errors: missing separator, bad JSON, out-of-range aspect") {
    CHECK_THROWS_WITH_AS(parse_rating("prose with no separator"),
                         doctest::Contains("separator"), DataError);
    CHECK_THROWS_AS(parse_rating("Explanation: x\n====================\nnot json"), DataError);
    std::string text = kRatingFixture;
    const auto pos = text.find("\"Clarity\": 5");
    text.replace(pos, 12, "\"Clarity\": 6");
    CHECK_THROWS_WITH_AS(parse_rating(text), doctest::Contains("range"), DataError);
}

TEST_CASE("parse_rating after format_rating is identity") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 200; ++i) {
        AspectScores s;
        s.clarity = static_cast<int>(rng() % 6);
        s.complexity = static_cast<int>(rng() % 6);
        s.correctness = static_cast<int>(rng() % 6);
        s.usefulness = static_cast<int>(rng() % 6);
        s.adaptability = static_cast<int>(rng() % 6);
        s.total = s.aspect_sum();
        s.explanation = "case " + std::to_string(i);
        CHECK(parse_rating(format_rating(s)) == s);
    }
}

TEST_CASE("mock backend is deterministic for (prompt, seed)") {
    MockBackend a(42), b(42), other(43);
    CompletionRequest request;
    request.prompt = render_prompt(TemplateId::cpt_label, {{"Extract", "some extract"}});
    CHECK(a.complete(request).text == a.complete(request).text);
    CHECK(a.complete(request).text == b.complete(request).text);
    CHECK(a.complete(request).text != other.complete(request).text);
}

TEST_CASE("mock fixtures take precedence and missing fixtures fail without a seed") {
    MockBackend mock;
    mock.add_fixture("p1", "r1");
    CHECK(mock.complete({"p1"}).text == "r1");
    CHECK_THROWS_AS(mock.complete({"p2"}), BackendError);
}

TEST_CASE("mock correction response echoes cleaned raw text behind the preamble") {
    MockBackend mock(1);
    CompletionRequest request;
    request.prompt = render_prompt(TemplateId::correction, {{"RawText", kRawFixture}});
    const CorrectionParse parsed = parse_correction(mock.complete(request).text);
    CHECK(parsed.preamble_found);
    CHECK(parsed.text.find("  ") == std::string::npos);
}

TEST_CASE("gateway retries transient failures with a bounded budget") {
    auto mock = std::make_shared<MockBackend>(7);
    CompletionRequest request;
    request.prompt = render_prompt(TemplateId::cpt_label, {{"Extract", "x"}});
    const std::string expected = mock->complete(request).text;

    Gateway ok(std::make_shared<FlakyBackend>(mock, 2), fast_policy(3));
    CHECK(ok.complete(request).text == expected);

    Gateway exhausted(std::make_shared<FlakyBackend>(mock, 5), fast_policy(3));
    CHECK_THROWS_WITH_AS(exhausted.complete(request), doctest::Contains("transport error"),
                         BackendError);
}

TEST_CASE("non-transient backend errors are not retried") {
    struct PermanentFail final : Backend {
        int calls = 0;
        CompletionResponse complete(const CompletionRequest&) override {
            ++calls;
            throw BackendError("bad request", /*transient=*/false);
        }
        std::string id() const override { return "permfail"; }
    };
    auto backend = std::make_shared<PermanentFail>();
    Gateway gateway(backend, fast_policy(5));
    CHECK_THROWS_AS(gateway.complete({"p"}), BackendError);
    CHECK(backend->calls == 1);
}

TEST_CASE("live backend without the credential env var is a config error") {
    ::unsetenv("SCIPREP_TEST_MISSING_KEY");
    HttpBackendConfig config;
    config.url = "http://localhost:1/v1/chat/completions";
    config.model = "m";
    config.credential_env = "SCIPREP_TEST_MISSING_KEY";
    CHECK_THROWS_WITH_AS(HttpBackend{config}, doctest::Contains("SCIPREP_TEST_MISSING_KEY"),
                         ConfigError);
}

TEST_CASE("completed responses are independent of scheduling under any in-flight bound") {
    std::vector<CompletionRequest> batch;
    for (int i = 0; i < 24; ++i)
        batch.push_back(
            {render_prompt(TemplateId::cpt_label, {{"Extract", "e" + std::to_string(i)}})});

    auto run_batch = [&](int in_flight, int threads) {
        Gateway gateway(std::make_shared<MockBackend>(9), fast_policy(0, in_flight));
        std::vector<std::string> results(batch.size());
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                for (;;) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= batch.size()) return;
                    results[i] = gateway.complete(batch[i]).text;
                }
            });
        for (auto& t : pool) t.join();
        return results;
    };

    const auto base = run_batch(1, 1);
    CHECK(run_batch(1, 8) == base);
    CHECK(run_batch(3, 8) == base);
    CHECK(run_batch(16, 8) == base);
}

TEST_SUITE_END();
