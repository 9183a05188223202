#pragma once

#include <filesystem>
#include <string>

#include "cocomo/crit.hpp"

namespace cocomo::crit {

struct DocumentSet {
    DocumentStore store;
    std::string root;  // id of the first document in the file
};

/// Loads a document file: either one document object or
/// {"documents": [...]} whose first entry is the root. Sub-document ids that
/// are not defined in the file are looked up as "<id>.json" next to it.
/// Throws ParseError / InvalidDocument.
DocumentSet load_documents(const std::filesystem::path& path);
DocumentSet parse_documents(const std::string& text,
                            const std::filesystem::path& sibling_dir = {});

/// {"scores": [{"reason", "claim", "gamma", "theta"}],
///  "credibility": [{"source", "theta"}]}
Fixture load_fixture(const std::filesystem::path& path);
Fixture parse_fixture(const std::string& text);

/// Report as pretty-printed JSON (no trailing newline).
std::string to_json(const CritReport& report);

/// Evaluator backed by a child process started with `/bin/sh -c command`.
///
/// Each request is one JSON line on the child's stdin:
///   {"kind":"validate","claim":...,"reason":...}
///   {"kind":"credibility","source":...}
/// and each answer one line "gamma theta" on its stdout (for credibility
/// requests only theta is used). Failures surface as EvaluatorFailure.
class ProcessEvaluator final : public Evaluator {
public:
    explicit ProcessEvaluator(const std::string& command);
    ~ProcessEvaluator() override;
    ProcessEvaluator(const ProcessEvaluator&) = delete;
    ProcessEvaluator& operator=(const ProcessEvaluator&) = delete;

    ReasonScore validate(const Reason& reason, const std::string& claim) override;
    double credibility(const std::string& source) override;

private:
    ReasonScore round_trip(const std::string& request);

    int fd_ = -1;
    int pid_ = -1;
    std::string buffer_;
};

}  // namespace cocomo::crit
