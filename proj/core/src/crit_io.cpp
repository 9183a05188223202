#include "cocomo/crit_io.hpp"

#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <csignal>
#include <cstring>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "cocomo/error.hpp"

namespace cocomo::crit {

namespace {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(Errc::Io, "cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json parse_json(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(Errc::ParseError, what + ": " + e.what());
    }
}

std::string require_string(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key) || !j[key].is_string()) {
        throw Error(Errc::ParseError, where + "." + key + ": expected a string");
    }
    return j[key].get<std::string>();
}

double require_number(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key) || !j[key].is_number()) {
        throw Error(Errc::ParseError, where + "." + key + ": expected a number");
    }
    return j[key].get<double>();
}

std::vector<Reason> parse_reasons(const json& j, const char* key, const std::string& where) {
    std::vector<Reason> out;
    if (!j.contains(key)) {
        return out;
    }
    if (!j[key].is_array()) {
        throw Error(Errc::ParseError, where + "." + key + ": expected an array");
    }
    for (std::size_t i = 0; i < j[key].size(); ++i) {
        const auto& r = j[key][i];
        const std::string at = where + "." + key + "[" + std::to_string(i) + "]";
        Reason reason;
        if (r.is_string()) {
            reason.text = r.get<std::string>();
        } else if (r.is_object()) {
            reason.text = require_string(r, "text", at);
            if (r.contains("sub_doc") && !r["sub_doc"].is_null()) {
                reason.sub_doc = require_string(r, "sub_doc", at);
            }
            reason.is_claim = r.value("is_claim", reason.sub_doc.has_value());
        } else {
            throw Error(Errc::ParseError, at + ": expected a string or an object");
        }
        out.push_back(std::move(reason));
    }
    return out;
}

Document parse_document(const json& j, const std::string& where) {
    if (!j.is_object()) {
        throw Error(Errc::ParseError, where + ": expected an object");
    }
    Document d;
    d.id = require_string(j, "id", where);
    d.source = j.contains("source") ? require_string(j, "source", where) : std::string{};
    d.claim = require_string(j, "claim", where);
    d.reasons = parse_reasons(j, "reasons", where);
    d.rivals = parse_reasons(j, "rivals", where);
    d.validate();
    return d;
}

void add_all(const json& j, DocumentSet& set, const std::string& where) {
    if (j.is_object() && j.contains("documents")) {
        if (!j["documents"].is_array() || j["documents"].empty()) {
            throw Error(Errc::ParseError, where + ".documents: expected a non-empty array");
        }
        for (std::size_t i = 0; i < j["documents"].size(); ++i) {
            auto doc = parse_document(j["documents"][i],
                                      where + ".documents[" + std::to_string(i) + "]");
            if (set.root.empty()) {
                set.root = doc.id;
            }
            set.store.add(std::move(doc));
        }
    } else {
        auto doc = parse_document(j, where);
        if (set.root.empty()) {
            set.root = doc.id;
        }
        set.store.add(std::move(doc));
    }
}

// Pulls in "<id>.json" siblings for sub-documents not defined so far.
void resolve_siblings(DocumentSet& set, const std::filesystem::path& dir) {
    std::set<std::string> tried;
    bool grew = true;
    while (grew) {
        grew = false;
        std::vector<std::string> missing;
        std::vector<std::string> stack{set.root};
        std::set<std::string> seen;
        while (!stack.empty()) {
            auto id = stack.back();
            stack.pop_back();
            if (!seen.insert(id).second || !set.store.contains(id)) {
                if (!set.store.contains(id) && !tried.contains(id)) {
                    missing.push_back(id);
                }
                continue;
            }
            const Document& doc = set.store.find(id);
            for (const auto* list : {&doc.reasons, &doc.rivals}) {
                for (const auto& r : *list) {
                    if (r.sub_doc) {
                        stack.push_back(*r.sub_doc);
                    }
                }
            }
        }
        for (const auto& id : missing) {
            tried.insert(id);
            const auto candidate = dir / (id + ".json");
            if (dir.empty() || !std::filesystem::exists(candidate)) {
                continue;
            }
            add_all(parse_json(read_file(candidate), candidate.string()), set, id);
            grew = true;
        }
    }
}

}  // namespace

DocumentSet parse_documents(const std::string& text, const std::filesystem::path& sibling_dir) {
    DocumentSet set;
    add_all(parse_json(text, "document"), set, "document");
    resolve_siblings(set, sibling_dir);
    return set;
}

DocumentSet load_documents(const std::filesystem::path& path) {
    return parse_documents(read_file(path), path.parent_path());
}

Fixture parse_fixture(const std::string& text) {
    const json j = parse_json(text, "fixture");
    if (!j.is_object()) {
        throw Error(Errc::ParseError, "fixture: expected an object");
    }
    Fixture f;
    if (j.contains("scores")) {
        for (std::size_t i = 0; i < j["scores"].size(); ++i) {
            const auto& e = j["scores"][i];
            const std::string at = "fixture.scores[" + std::to_string(i) + "]";
            f.scores[{require_string(e, "reason", at), require_string(e, "claim", at)}] =
                ReasonScore{require_number(e, "gamma", at), require_number(e, "theta", at)};
        }
    }
    if (j.contains("credibility")) {
        for (std::size_t i = 0; i < j["credibility"].size(); ++i) {
            const auto& e = j["credibility"][i];
            const std::string at = "fixture.credibility[" + std::to_string(i) + "]";
            f.credibility[require_string(e, "source", at)] = require_number(e, "theta", at);
        }
    }
    return f;
}

Fixture load_fixture(const std::filesystem::path& path) { return parse_fixture(read_file(path)); }

std::string to_json(const CritReport& report) {
    nlohmann::ordered_json j;
    j["doc_id"] = report.doc_id;
    j["score"] = report.score;
    j["depth_used"] = report.depth_used;
    auto rows = nlohmann::ordered_json::array();
    for (const auto& r : report.per_reason) {
        nlohmann::ordered_json row;
        row["text"] = r.text;
        row["role"] = r.role == Role::Supporting ? "supporting" : "rival";
        row["gamma"] = r.score.gamma;
        row["theta"] = r.score.theta;
        if (r.sub_doc) {
            row["sub_doc"] = *r.sub_doc;
        }
        rows.push_back(std::move(row));
    }
    j["per_reason"] = std::move(rows);
    return j.dump(2);
}

ProcessEvaluator::ProcessEvaluator(const std::string& command) {
    int fds[2];
    if (::socketpair(AF_UNIX, SOCK_STREAM, 0, fds) != 0) {
        throw Error(Errc::EvaluatorFailure, std::string("socketpair: ") + std::strerror(errno));
    }
    const pid_t pid = ::fork();
    if (pid < 0) {
        ::close(fds[0]);
        ::close(fds[1]);
        throw Error(Errc::EvaluatorFailure, std::string("fork: ") + std::strerror(errno));
    }
    if (pid == 0) {
        ::close(fds[0]);
        ::dup2(fds[1], STDIN_FILENO);
        ::dup2(fds[1], STDOUT_FILENO);
        ::close(fds[1]);
        ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
        ::_exit(127);
    }
    ::close(fds[1]);
    fd_ = fds[0];
    pid_ = pid;
}

ProcessEvaluator::~ProcessEvaluator() {
    if (fd_ >= 0) {
        ::shutdown(fd_, SHUT_WR);
        ::close(fd_);
    }
    if (pid_ > 0) {
        int status = 0;
        ::waitpid(pid_, &status, 0);
    }
}

ReasonScore ProcessEvaluator::round_trip(const std::string& request) {
    std::string line = request + "\n";
    std::size_t sent = 0;
    while (sent < line.size()) {
        const auto n = ::send(fd_, line.data() + sent, line.size() - sent, MSG_NOSIGNAL);
        if (n <= 0) {
            throw Error(Errc::EvaluatorFailure, "evaluator process closed its input");
        }
        sent += static_cast<std::size_t>(n);
    }
    std::size_t nl;
    while ((nl = buffer_.find('\n')) == std::string::npos) {
        char chunk[512];
        const auto n = ::recv(fd_, chunk, sizeof chunk, 0);
        if (n <= 0) {
            throw Error(Errc::EvaluatorFailure, "evaluator process ended without answering");
        }
        buffer_.append(chunk, static_cast<std::size_t>(n));
    }
    const std::string answer = buffer_.substr(0, nl);
    buffer_.erase(0, nl + 1);
    std::istringstream in(answer);
    double gamma = 0.0;
    double theta = 0.0;
    if (!(in >> gamma >> theta)) {
        throw Error(Errc::EvaluatorFailure, "unreadable evaluator answer '" + answer + "'");
    }
    return ReasonScore::checked(gamma, theta);
}

ReasonScore ProcessEvaluator::validate(const Reason& reason, const std::string& claim) {
    nlohmann::ordered_json req;
    req["kind"] = "validate";
    req["claim"] = claim;
    req["reason"] = reason.text;
    return round_trip(req.dump());
}

double ProcessEvaluator::credibility(const std::string& source) {
    nlohmann::ordered_json req;
    req["kind"] = "credibility";
    req["source"] = source;
    return round_trip(req.dump()).theta;
}

}  // namespace cocomo::crit
