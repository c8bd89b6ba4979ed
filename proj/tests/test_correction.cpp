#include <doctest.h>

#include <random>

#include "sciprep/correction.hpp"
#include "sciprep/prompts.hpp"

using namespace sciprep;

namespace {

const char* kRawFixture =
    "Highly p e n e t r a t i n g radiation, such as $\\gamma$-rays or fast electorns, "
    "deposits ener gy\n\nthroughout the solid t a r g e t material. Gas production occurs "
    "w i t h i n the solid phase.";
const char* kCorrectedFixture =
    "Highly penetrating radiation, such as $\\gamma$-rays or fast electrons, deposits energy "
    "throughout the solid target material. Gas production occurs within the solid phase.";

DocumentRecord make_doc(std::string text, std::string id = "d1") {
    DocumentRecord doc;
    doc.id = std::move(id);
    doc.source = Source::textbook;
    doc.domain = "sci";
    doc.raw_text = std::move(text);
    ApproxTokenizer tok;
    doc.token_count = tok.count(doc.raw_text);
    doc.stage_flags.set(StageFlag::ingested);
    return doc;
}

std::string words(std::size_t count, const std::string& word = "word") {
    std::string out;
    for (std::size_t i = 0; i < count; ++i) {
        if (i) out += ' ';
        out += word;
    }
    return out;
}

// Echoes the chunk text behind the preamble: correction becomes the identity.
class EchoBackend final : public Backend {
public:
    CompletionResponse complete(const CompletionRequest& request) override {
        const std::string begin = "Raw Text:\n\n";
        const std::string end = "\n\nStart your response";
        const std::size_t b = request.prompt.find(begin) + begin.size();
        const std::size_t e = request.prompt.find(end, b);
        return {std::string(kCorrectionPreamble) + "\n\n" +
                    request.prompt.substr(b, e - b),
                "echo"};
    }
    std::string id() const override { return "echo"; }
};

} // namespace

TEST_SUITE_BEGIN("correction");

TEST_CASE("small document is a single chunk equal to the document") {
    ApproxTokenizer tok;
    const DocumentRecord doc = make_doc(words(10));
    const auto chunks = chunk_document(doc, 2048, tok);
    REQUIRE(chunks.size() == 1);
    CHECK(chunks[0].text == doc.raw_text);
    CHECK(chunks[0].index == 0);
    CHECK(chunks[0].token_count == 10);
}

TEST_CASE("two paragraphs over budget split at the blank line") {
    ApproxTokenizer tok;
    const std::string p1 = words(1500, "alfa");
    const std::string p2 = words(1500, "beta");
    const DocumentRecord doc = make_doc(p1 + "\n\n" + p2);
    const auto chunks = chunk_document(doc, 2048, tok);
    REQUIRE(chunks.size() == 2);
    CHECK(chunks[0].text == p1);
    CHECK(chunks[1].text == p2);
    CHECK(chunks[0].joiner == "\n\n");
    CHECK(reassemble(chunks, {chunks[0].text, chunks[1].text}) == doc.raw_text);
}

TEST_CASE("empty document yields no chunks") {
    ApproxTokenizer tok;
    CHECK(chunk_document(make_doc(""), 2048, tok).empty());
}

TEST_CASE("budget below 64 is rejected") {
    ApproxTokenizer tok;
    CHECK_THROWS_AS(chunk_document(make_doc("x"), 63, tok), ConfigError);
}

TEST_CASE("single over-budget paragraph splits at whitespace within budget") {
    ApproxTokenizer tok;
    const DocumentRecord doc = make_doc(words(200));
    const auto chunks = chunk_document(doc, 64, tok);
    CHECK(chunks.size() > 1);
    std::vector<std::string> texts;
    for (const auto& c : chunks) {
        CHECK(c.token_count <= 64);
        CHECK(!c.text.empty());
        CHECK(c.text.front() != ' ');
        CHECK(c.text.back() != ' ');
        texts.push_back(c.text);
    }
    CHECK(reassemble(chunks, texts) == doc.raw_text);
}

TEST_CASE("a single word longer than the budget is hard-split with progress") {
    ApproxTokenizer tok;
    const DocumentRecord doc = make_doc(std::string(2000, 'x'));
    const auto chunks = chunk_document(doc, 64, tok);
    CHECK(chunks.size() > 1);
    std::vector<std::string> texts;
    for (const auto& c : chunks) {
        CHECK(c.token_count <= 64);
        texts.push_back(c.text);
    }
    CHECK(reassemble(chunks, texts) == doc.raw_text);
}

TEST_CASE("chunking reassembles losslessly for randomized documents") {
    ApproxTokenizer tok;
    std::mt19937_64 rng(31337);
    const char pieces[] = {' ', ' ', 'a', 'b', 'c', '\n', '\t'};
    for (int round = 0; round < 200; ++round) {
        std::string text;
        const std::size_t len = rng() % 2000;
        for (std::size_t i = 0; i < len; ++i) {
            if (rng() % 23 == 0) text += "\n\n";
            text += pieces[rng() % sizeof(pieces)];
        }
        const DocumentRecord doc = make_doc(text, "r" + std::to_string(round));
        const auto chunks = chunk_document(doc, 64, tok);
        std::vector<std::string> texts;
        std::size_t total_tokens = 0;
        for (const auto& c : chunks) {
            CHECK(c.token_count <= 64);
            total_tokens += c.token_count;
            texts.push_back(c.text);
        }
        CHECK(reassemble(chunks, texts) == text);
        CHECK(total_tokens == tok.count(text));
    }
}

TEST_CASE("correction fixture pair flows through the gateway") {
    ApproxTokenizer tok;
    const DocumentRecord doc = make_doc(kRawFixture);

    auto mock = std::make_shared<MockBackend>();
    const auto chunks = chunk_document(doc, 2048, tok);
    REQUIRE(chunks.size() == 1);
    mock->add_fixture(render_prompt(TemplateId::correction, {{"RawText", chunks[0].text}}),
                      std::string(kCorrectionPreamble) + "\n\n" + kCorrectedFixture);
    Gateway gateway(mock, {});

    const CorrectionOutcome outcome = correct_document(doc, gateway, {}, tok);
    REQUIRE(outcome.doc.corrected_text.has_value());
    CHECK(outcome.doc.corrected_text->rfind("Highly penetrating radiation", 0) == 0);
    CHECK(outcome.doc.stage_flags.has(StageFlag::corrected));
    CHECK(outcome.doc.token_count == tok.count(*outcome.doc.corrected_text));
    CHECK(outcome.chunks_fallback == 0);
}

TEST_CASE("ratio guard rejects runaway corrections and keeps the raw chunk") {
    ApproxTokenizer tok;
    const DocumentRecord doc = make_doc(words(20));

    auto mock = std::make_shared<MockBackend>();
    const auto chunks = chunk_document(doc, 2048, tok);
    std::string inflated(doc.raw_text.size() * 10, 'z');
    mock->add_fixture(render_prompt(TemplateId::correction, {{"RawText", chunks[0].text}}),
                      std::string(kCorrectionPreamble) + "\n\n" + inflated);
    Gateway gateway(mock, {});

    const CorrectionOutcome outcome = correct_document(doc, gateway, {}, tok);
    CHECK(outcome.chunks_fallback == 1);
    CHECK(*outcome.doc.corrected_text == doc.raw_text);
}

TEST_CASE("identity backend makes correction idempotent") {
    ApproxTokenizer tok;
    Gateway gateway(std::make_shared<EchoBackend>(), {});
    const DocumentRecord doc = make_doc(words(300) + "\n\n" + words(40, "beta"));

    const CorrectionOutcome once = correct_document(doc, gateway, {}, tok);
    CHECK(*once.doc.corrected_text == doc.raw_text);

    DocumentRecord again_in = once.doc;
    again_in.raw_text = *once.doc.corrected_text;
    const CorrectionOutcome twice = correct_document(again_in, gateway, {}, tok);
    CHECK(*twice.doc.corrected_text == *once.doc.corrected_text);
}

TEST_CASE("correction preserves chunk count and paragraph structure") {
    ApproxTokenizer tok;
    Gateway gateway(std::make_shared<EchoBackend>(), {});
    const DocumentRecord doc =
        make_doc(words(100, "p1") + "\n\n" + words(100, "p2") + "\n\n" + words(100, "p3"));
    const auto chunks = chunk_document(doc, 2048, tok);
    const CorrectionOutcome outcome = correct_document(doc, gateway, {}, tok);
    CHECK(outcome.chunks_total == chunks.size());
    // identity correction: same paragraph count
    const std::string& corrected = *outcome.doc.corrected_text;
    std::size_t paragraphs = 1;
    for (std::size_t pos = corrected.find("\n\n"); pos != std::string::npos;
         pos = corrected.find("\n\n", pos + 2))
        ++paragraphs;
    CHECK(paragraphs == 3);
}

TEST_CASE("transport failures carry doc id and chunk index") {
    struct DownBackend final : Backend {
        CompletionResponse complete(const CompletionRequest&) override {
            throw BackendError("connection refused", /*transient=*/true);
        }
        std::string id() const override { return "down"; }
    };
    ApproxTokenizer tok;
    GatewayPolicy policy;
    policy.max_retries = 1;
    policy.backoff_initial_ms = 1;
    Gateway gateway(std::make_shared<DownBackend>(), policy);
    const DocumentRecord doc = make_doc(words(5), "doc-err");
    CHECK_THROWS_WITH_AS(correct_document(doc, gateway, {}, tok),
                         doctest::Contains("doc-err"), BackendError);
}

TEST_SUITE_END();
