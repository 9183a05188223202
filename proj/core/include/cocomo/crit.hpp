#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace cocomo::crit {

struct Reason {
    std::string text;
    bool is_claim = false;               // backed by a sub-document
    std::optional<std::string> sub_doc;  // required when is_claim
};

struct Document {
    std::string id;
    std::string source;  // provenance label, scored for credibility
    std::string claim;
    std::vector<Reason> reasons;
    std::vector<Reason> rivals;

    /// Throws InvalidDocument (empty claim, claim reason without sub_doc) or
    /// EmptyArgument (no reasons and no rivals).
    void validate() const;
};

/// Validity (gamma) and source credibility (theta), both in [1, 10].
struct ReasonScore {
    double gamma = 1.0;
    double theta = 1.0;

    /// Throws ScoreOutOfRange unless both components lie in [1, 10].
    static ReasonScore checked(double gamma, double theta);

    friend bool operator==(const ReasonScore&, const ReasonScore&) = default;
};

enum class Role { Supporting, Rival };

struct ScoredReason {
    std::string text;
    ReasonScore score;
    Role role = Role::Supporting;
    std::optional<std::string> sub_doc;
};

struct CritReport {
    std::string doc_id;
    double score = 1.0;
    std::vector<ScoredReason> per_reason;
    int depth_used = 0;
};

/// Source of (gamma, theta) judgements; in production typically an LLM.
class Evaluator {
public:
    virtual ~Evaluator() = default;
    /// Scores how well `reason` supports `claim`.
    virtual ReasonScore validate(const Reason& reason, const std::string& claim) = 0;
    /// Credibility of a document source, in [1, 10].
    virtual double credibility(const std::string& source) = 0;
};

/// Deterministic lookup tables for an evaluator.
struct Fixture {
    std::map<std::pair<std::string, std::string>, ReasonScore> scores;  // (reason, claim)
    std::map<std::string, double> credibility;                          // source -> theta
};

class StubEvaluator final : public Evaluator {
public:
    /// Throws ScoreOutOfRange if any fixture entry is outside [1, 10].
    explicit StubEvaluator(Fixture fixture);

    ReasonScore validate(const Reason& reason, const std::string& claim) override;
    double credibility(const std::string& source) override;

private:
    Fixture fixture_;
};

[[nodiscard]] StubEvaluator validate_stub(Fixture fixture);

class DocumentStore {
public:
    void add(Document doc);
    [[nodiscard]] const Document& find(const std::string& id) const;
    [[nodiscard]] bool contains(const std::string& id) const { return docs_.contains(id); }
    [[nodiscard]] std::size_t size() const noexcept { return docs_.size(); }

private:
    std::map<std::string, Document> docs_;
};

/// Credibility-weighted mean of supporting validity minus lambda-weighted
/// rival validity, clamped to [1, 10]:
///
///   (sum g_r t_r - lambda sum g_r' t_r') / (sum t_r + lambda sum t_r')
///
/// Throws EmptyArgument when there is nothing to weigh.
[[nodiscard]] double aggregate(std::span<const ReasonScore> supporting,
                               std::span<const ReasonScore> rivals, double lambda = 1.0);

/// Scores `doc`. Reasons and rivals that are themselves claims recurse into
/// their sub-document (its score becomes gamma, its source credibility
/// theta) while depth remains; reaching one at depth 0 throws DepthExhausted.
[[nodiscard]] CritReport evaluate(const Document& doc, const DocumentStore& store,
                                  Evaluator& evaluator, int depth_limit, double lambda = 1.0);

}  // namespace cocomo::crit
