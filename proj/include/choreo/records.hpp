#pragma once

#include "choreo/bifurcation.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace choreo {

// ---------------------------------------------------------------------------
// Key-value record files: one "key value..." line per entry, doubles at full
// round-trip precision. Deterministic output for identical inputs.
// ---------------------------------------------------------------------------

class Record {
public:
    std::string type;

    void set(const std::string& key, const std::string& v) { text_[key] = v; }
    void set(const std::string& key, double v) { num_[key] = {v}; }
    void set(const std::string& key, int v) { set(key, std::string(format_int(v))); }
    void set(const std::string& key, const Eigen::VectorXd& v) {
        num_[key] = std::vector<double>(v.data(), v.data() + v.size());
    }
    void set(const std::string& key, const std::vector<double>& v) { num_[key] = v; }

    bool has(const std::string& key) const { return num_.count(key) || text_.count(key); }

    const std::string& text(const std::string& key) const {
        auto it = text_.find(key);
        if (it == text_.end()) throw DomainError("record: missing key " + key);
        return it->second;
    }
    double number(const std::string& key) const {
        auto it = num_.find(key);
        if (it == num_.end() || it->second.empty())
            throw DomainError("record: missing key " + key);
        return it->second.front();
    }
    Eigen::VectorXd numbers(const std::string& key) const {
        auto it = num_.find(key);
        if (it == num_.end()) throw DomainError("record: missing key " + key);
        return Eigen::Map<const Eigen::VectorXd>(it->second.data(), it->second.size());
    }
    int integer(const std::string& key) const {
        return static_cast<int>(llround(number(key)));
    }

    std::string serialize() const {
        std::ostringstream os;
        os << "record " << type << "\n";
        for (const auto& [k, v] : text_) os << k << " = " << v << "\n";
        for (const auto& [k, vals] : num_) {
            os << k << " =";
            for (double x : vals) {
                char buf[40];
                std::snprintf(buf, sizeof buf, " %.17g", x);
                os << buf;
            }
            os << "\n";
        }
        return os.str();
    }

    static Record parse(const std::string& body) {
        Record rec;
        std::istringstream is(body);
        std::string line;
        while (std::getline(is, line)) {
            if (line.empty() || line[0] == '#') continue;
            std::istringstream ls(line);
            std::string key;
            ls >> key;
            if (key == "record") {
                ls >> rec.type;
                continue;
            }
            std::string eq;
            ls >> eq;
            if (eq != "=") throw DomainError("record: malformed line: " + line);
            std::vector<double> vals;
            std::string tok;
            bool numeric = true;
            std::vector<std::string> toks;
            while (ls >> tok) {
                toks.push_back(tok);
                char* end = nullptr;
                std::strtod(tok.c_str(), &end);
                if (end == tok.c_str() || *end != '\0') numeric = false;
            }
            if (toks.empty()) {
                rec.text_[key] = "";
            } else if (numeric) {
                for (const auto& t : toks) vals.push_back(std::strtod(t.c_str(), nullptr));
                rec.num_[key] = vals;
            } else {
                std::string joined;
                for (size_t i = 0; i < toks.size(); ++i)
                    joined += (i ? " " : "") + toks[i];
                rec.text_[key] = joined;
            }
        }
        return rec;
    }

private:
    static std::string format_int(long long v) { return std::to_string(v); }
    std::map<std::string, std::string> text_;
    std::map<std::string, std::vector<double>> num_;
};

// ---------------------------------------------------------------------------
// Conversions
// ---------------------------------------------------------------------------

inline std::string potential_name(const PotentialSpec& spec) {
    if (spec.kind == PotentialKind::LennardJones) return "lj";
    char buf[40];
    std::snprintf(buf, sizeof buf, "homog:%.17g", spec.exponent);
    return buf;
}

inline PotentialSpec potential_from_name(const std::string& s) {
    if (s == "lj") return PotentialSpec::lennard_jones();
    if (s.rfind("homog:", 0) == 0)
        return PotentialSpec::homogeneous(std::strtod(s.c_str() + 6, nullptr));
    if (s == "homog") return PotentialSpec::homogeneous(1.0);
    throw DomainError("unknown potential: " + s);
}

inline Record to_record(const PeriodicSolution& sol) {
    Record r;
    r.type = "periodic_solution";
    r.set("potential", potential_name(sol.spec));
    r.set("family", std::string(family_name(sol.family)));
    r.set("period", sol.period);
    r.set("params", sol.params);
    r.set("state0.q", Eigen::VectorXd(sol.state0.q));
    r.set("state0.v", Eigen::VectorXd(sol.state0.v));
    r.set("index.d", sol.indices.d);
    r.set("index.l", sol.indices.l);
    r.set("index.deltaI", sol.indices.delta_i);
    r.set("residual_norm", sol.residual_norm);
    r.set("action", sol.action);
    r.set("frame_rotation", sol.frame_rotation);
    return r;
}

inline PeriodicSolution solution_from_record(const Record& r) {
    if (r.type != "periodic_solution") throw DomainError("not a solution record");
    PeriodicSolution sol;
    sol.spec = potential_from_name(r.text("potential"));
    const auto fam = family_from_name(r.text("family"));
    if (!fam) throw DomainError("bad family in record");
    sol.family = *fam;
    sol.period = r.number("period");
    sol.params = r.numbers("params");
    sol.state0.q = r.numbers("state0.q");
    sol.state0.v = r.numbers("state0.v");
    sol.indices.d = r.number("index.d");
    sol.indices.l = r.number("index.l");
    sol.indices.delta_i = r.number("index.deltaI");
    sol.residual_norm = r.number("residual_norm");
    sol.action = r.number("action");
    sol.frame_rotation = r.number("frame_rotation");
    return sol;
}

inline Record to_record(const BifurcationRecord& b) {
    Record r;
    r.type = "bifurcation";
    r.set("potential", potential_name(b.branch.spec));
    r.set("alpha_sign", b.branch.alpha_sign);
    r.set("xi0", b.xi0);
    r.set("delta_n", b.delta_n);
    r.set("degeneracy", b.degeneracy);
    r.set("lambda_analysis", b.lambda_at_analysis);
    r.set("xi_analysis", b.xi_analysis);
    r.set("q_symmetry", std::string(q_symmetry_name(b.q_symmetry)));
    r.set("side", std::string(side_name(b.side)));
    r.set("n_b", b.n_b);
    r.set("congruent_counts",
          std::vector<double>(b.congruent_counts.begin(), b.congruent_counts.end()));
    r.set("critical_thetas", b.critical_thetas);
    r.set("ledger.counts_ok", b.ledger.counts_ok ? 1 : 0);
    r.set("ledger.parity_checked", b.ledger.parity_checked ? 1 : 0);
    r.set("ledger.parity_ok", b.ledger.parity_ok ? 1 : 0);
    r.set("ledger.detail", b.ledger.detail);
    r.set("n_candidates", static_cast<int>(b.candidates.size()));
    for (size_t i = 0; i < b.candidates.size(); ++i) {
        const auto& c = b.candidates[i];
        const std::string p = "candidate." + std::to_string(i) + ".";
        r.set(p + "side", c.side);
        r.set(p + "xi", c.xi);
        r.set(p + "theta", c.theta);
        r.set(p + "family", std::string(family_name(c.solution.family)));
        r.set(p + "q_label", std::string(q_symmetry_name(c.q_label)));
        r.set(p + "params", c.solution.params);
        r.set(p + "delta_s", c.delta_s);
        r.set(p + "congruence_class", c.congruence_class);
        r.set(p + "index.d", c.solution.indices.d);
        r.set(p + "index.l", c.solution.indices.l);
        r.set(p + "index.deltaI", c.solution.indices.delta_i);
        r.set(p + "action", c.solution.action);
    }
    return r;
}

inline Record to_record(const BranchScan& scan) {
    Record r;
    r.type = "branch_scan";
    r.set("potential", potential_name(scan.id.spec));
    r.set("alpha_sign", scan.id.alpha_sign);
    r.set("parameter", scan.id.parameter_name());
    r.set("grid_size", scan.grid_size);
    r.set("n_samples", static_cast<int>(scan.samples.size()));
    std::vector<double> xi, index, zeros;
    for (const auto& s : scan.samples) {
        xi.push_back(s.xi);
        index.push_back(s.report.index);
        zeros.push_back(s.report.zero_mode_count);
    }
    r.set("xi", xi);
    r.set("morse_index", index);
    r.set("zero_modes", zeros);
    for (size_t i = 0; i < scan.samples.size(); ++i)
        r.set("trace." + std::to_string(i), scan.samples[i].lowest);
    for (size_t i = 0; i < scan.notes.size(); ++i)
        r.set("note." + std::to_string(i), scan.notes[i]);
    return r;
}

// ---------------------------------------------------------------------------
// Directory-backed store
// ---------------------------------------------------------------------------

class BranchStore {
public:
    explicit BranchStore(std::filesystem::path dir) : dir_(std::move(dir)) {
        std::filesystem::create_directories(dir_);
    }

    static BranchStore from_env() {
        const char* env = std::getenv("CHOREO_STORE");
        return BranchStore(env && *env ? env : "choreo-store");
    }

    std::filesystem::path path(const std::string& name) const {
        return dir_ / (sanitize(name) + ".record");
    }

    void put(const std::string& name, const Record& rec) const {
        std::ofstream os(path(name));
        if (!os) throw DomainError("store: cannot write " + path(name).string());
        os << rec.serialize();
    }

    Record get(const std::string& name) const {
        std::ifstream is(path(name));
        if (!is) throw DomainError("store: no record named " + name);
        std::stringstream ss;
        ss << is.rdbuf();
        return Record::parse(ss.str());
    }

    bool contains(const std::string& name) const {
        return std::filesystem::exists(path(name));
    }

    std::vector<std::string> list() const {
        std::vector<std::string> names;
        if (!std::filesystem::exists(dir_)) return names;
        for (const auto& e : std::filesystem::directory_iterator(dir_))
            if (e.path().extension() == ".record") names.push_back(e.path().stem().string());
        std::sort(names.begin(), names.end());
        return names;
    }

    const std::filesystem::path& dir() const { return dir_; }

private:
    static std::string sanitize(const std::string& s) {
        std::string out;
        for (char c : s)
            out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ||
                    c == '.')
                       ? c
                       : '_';
        return out;
    }
    std::filesystem::path dir_;
};

}  // namespace choreo
