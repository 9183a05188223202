#include "cocomo/crit.hpp"

#include <algorithm>
#include <cmath>

#include "cocomo/error.hpp"

namespace cocomo::crit {

namespace {

bool in_range(double v) { return v >= 1.0 && v <= 10.0; }

}  // namespace

void Document::validate() const {
    if (claim.empty()) {
        throw Error(Errc::InvalidDocument, "document '" + id + "' has an empty claim");
    }
    if (reasons.empty() && rivals.empty()) {
        throw Error(Errc::EmptyArgument, "document '" + id + "' has no reasons or rivals");
    }
    for (const auto* list : {&reasons, &rivals}) {
        for (const auto& r : *list) {
            if (r.is_claim && !r.sub_doc) {
                throw Error(Errc::InvalidDocument, "document '" + id +
                                                       "': claim reason without sub_doc: " + r.text);
            }
        }
    }
}

ReasonScore ReasonScore::checked(double gamma, double theta) {
    if (!in_range(gamma) || !in_range(theta)) {
        throw Error(Errc::ScoreOutOfRange, "(" + std::to_string(gamma) + ", " +
                                               std::to_string(theta) + ") outside [1, 10]");
    }
    return {gamma, theta};
}

StubEvaluator::StubEvaluator(Fixture fixture) : fixture_(std::move(fixture)) {
    for (const auto& [key, s] : fixture_.scores) {
        (void)ReasonScore::checked(s.gamma, s.theta);
    }
    for (const auto& [source, theta] : fixture_.credibility) {
        if (!in_range(theta)) {
            throw Error(Errc::ScoreOutOfRange, "credibility of '" + source + "' outside [1, 10]");
        }
    }
}

ReasonScore StubEvaluator::validate(const Reason& reason, const std::string& claim) {
    auto it = fixture_.scores.find({reason.text, claim});
    if (it == fixture_.scores.end()) {
        throw Error(Errc::UnknownFixtureEntry, "no score for reason '" + reason.text + "'");
    }
    return it->second;
}

double StubEvaluator::credibility(const std::string& source) {
    auto it = fixture_.credibility.find(source);
    if (it == fixture_.credibility.end()) {
        throw Error(Errc::UnknownFixtureEntry, "no credibility for source '" + source + "'");
    }
    return it->second;
}

StubEvaluator validate_stub(Fixture fixture) { return StubEvaluator(std::move(fixture)); }

void DocumentStore::add(Document doc) {
    auto id = doc.id;
    docs_.insert_or_assign(std::move(id), std::move(doc));
}

const Document& DocumentStore::find(const std::string& id) const {
    auto it = docs_.find(id);
    if (it == docs_.end()) {
        throw Error(Errc::UnknownDocument, "'" + id + "'");
    }
    return it->second;
}

double aggregate(std::span<const ReasonScore> supporting, std::span<const ReasonScore> rivals,
                 double lambda) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw Error(Errc::ValidationError, "lambda must be a non-negative number");
    }
    if (supporting.empty() && rivals.empty()) {
        throw Error(Errc::EmptyArgument, "no scores to aggregate");
    }
    double num = 0.0;
    double den = 0.0;
    for (const auto& s : supporting) {
        num += s.gamma * s.theta;
        den += s.theta;
    }
    double rival_num = 0.0;
    double rival_den = 0.0;
    for (const auto& s : rivals) {
        rival_num += s.gamma * s.theta;
        rival_den += s.theta;
    }
    num -= lambda * rival_num;
    den += lambda * rival_den;
    if (!(den > 0.0)) {
        throw Error(Errc::EmptyArgument, "no weighted evidence (rivals only with lambda = 0)");
    }
    return std::clamp(num / den, 1.0, 10.0);
}

namespace {

ReasonScore checked_from(Evaluator& evaluator, const Reason& reason, const std::string& claim) {
    ReasonScore s;
    try {
        s = evaluator.validate(reason, claim);
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw Error(Errc::EvaluatorFailure, e.what());
    }
    return ReasonScore::checked(s.gamma, s.theta);
}

}  // namespace

CritReport evaluate(const Document& doc, const DocumentStore& store, Evaluator& evaluator,
                    int depth_limit, double lambda) {
    if (depth_limit < 0) {
        throw Error(Errc::ValidationError, "depth limit must be non-negative");
    }
    doc.validate();

    CritReport report;
    report.doc_id = doc.id;
    std::vector<ReasonScore> supporting;
    std::vector<ReasonScore> rivals;

    const auto score_of = [&](const Reason& r) {
        if (!r.is_claim) {
            return checked_from(evaluator, r, doc.claim);
        }
        if (depth_limit == 0) {
            throw Error(Errc::DepthExhausted, "document '" + doc.id + "' needs sub-document '" +
                                                  *r.sub_doc + "' at depth 0");
        }
        const Document& sub = store.find(*r.sub_doc);
        const CritReport nested = evaluate(sub, store, evaluator, depth_limit - 1, lambda);
        double theta = 0.0;
        try {
            theta = evaluator.credibility(sub.source);
        } catch (const Error&) {
            throw;
        } catch (const std::exception& e) {
            throw Error(Errc::EvaluatorFailure, e.what());
        }
        report.depth_used = std::max(report.depth_used, nested.depth_used + 1);
        return ReasonScore::checked(nested.score, theta);
    };

    for (const auto& r : doc.reasons) {
        const ReasonScore s = score_of(r);
        supporting.push_back(s);
        report.per_reason.push_back({r.text, s, Role::Supporting, r.sub_doc});
    }
    for (const auto& r : doc.rivals) {
        const ReasonScore s = score_of(r);
        rivals.push_back(s);
        report.per_reason.push_back({r.text, s, Role::Rival, r.sub_doc});
    }
    report.score = aggregate(supporting, rivals, lambda);
    return report;
}

}  // namespace cocomo::crit
