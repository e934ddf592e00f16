// Command-line front end: solve families, compute Morse indices, scan
// branches, locate and analyze bifurcations, and emit search-aid data.
#include "choreo/choreo.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

using namespace choreo;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNonexistence = 2;
constexpr int kExitNoConvergence = 3;
constexpr int kExitBadConfig = 4;
constexpr int kExitAmbiguous = 5;

struct Options {
    std::string store_path;
    std::string out_dir;
    std::string potential = "homog:1";
    std::string family = "figure-eight";
    std::string branch = "minus";
    double period = 1.0;
    double a = std::numeric_limits<double>::quiet_NaN();
    int ng = 264;
    double tol_integration = 1e-12;
    double tol_newton = 1e-10;
    double tol_zero = 0.0;
};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

PotentialSpec parse_potential(Options& o) {
    PotentialSpec spec = potential_from_name(o.potential);
    if (spec.kind == PotentialKind::Homogeneous && !std::isnan(o.a))
        spec = PotentialSpec::homogeneous(o.a);
    return spec;
}

BranchId parse_branch(const Options& o, const PotentialSpec& spec) {
    if (spec.kind == PotentialKind::Homogeneous) return BranchId::homogeneous_family();
    if (o.branch != "minus" && o.branch != "plus")
        throw DomainError("--branch must be minus or plus");
    return BranchId::alpha(o.branch == "minus" ? -1 : +1);
}

BranchStore open_store(const Options& o) {
    if (!o.store_path.empty()) return BranchStore(o.store_path);
    return BranchStore::from_env();
}

std::filesystem::path out_dir(const Options& o, const BranchStore& store) {
    if (o.out_dir.empty()) return store.dir();
    std::filesystem::create_directories(o.out_dir);
    return o.out_dir;
}

/// Caption-style parameter line for a solution.
std::string caption_tuple(const PeriodicSolution& sol) {
    const auto& p = sol.params;
    std::string s;
    switch (sol.family) {
        case Family::FigureEight:
        case Family::Dxy:
            s = "(x, y, v; d) = (" + fmt6(p[0]) + ", " + fmt6(p[1]) + ", " + fmt6(p[2]) + "; " +
                fmt6(sol.indices.d) + ")";
            break;
        case Family::Dx:
        case Family::Cx:
            s = "(x, y, v, l) = (" + fmt6(p[0]) + ", " + fmt6(p[1]) + ", " + fmt6(p[2]) + ", " +
                fmt6(p[3]) + ")";
            break;
        case Family::D2:
        case Family::C2:
            s = "(x, u, v; dI) = (" + fmt6(p[0]) + ", " + fmt6(p[1]) + ", " + fmt6(p[2]) + "; " +
                fmt6(sol.indices.delta_i) + ")";
            break;
        case Family::Cy:
            s = "(x, y, u, v, w, y') = (" + fmt6(p[0]) + ", " + fmt6(p[1]) + ", " + fmt6(p[2]) +
                ", " + fmt6(p[3]) + ", " + fmt6(p[4]) + ", " + fmt6(p[5]) + ")";
            break;
    }
    return s;
}

std::string record_name(const PotentialSpec& spec, const std::string& family, double period) {
    std::string pot = spec.kind == PotentialKind::LennardJones
                          ? "lj"
                          : "homog" + fmt6(spec.exponent);
    char buf[32];
    std::snprintf(buf, sizeof buf, "T%.6g", period);
    return pot + "_" + family + "_" + buf;
}

/// Default crossing bracket for reaching a family without a stored record.
std::pair<double, double> default_bracket(const PotentialSpec& spec, Family fam,
                                          const BranchId& id) {
    if (spec.kind == PotentialKind::Homogeneous) {
        if (fam == Family::Dxy) return {0.95, 1.05};
        if (fam == Family::Dx || fam == Family::D2) return {1.30, 1.40};
        throw NonexistenceError("no known homogeneous bifurcation for this family");
    }
    if (id.alpha_sign < 0) {
        if (fam == Family::Cx) return {14.55, 14.68};
        if (fam == Family::Dxy) return {14.80, 14.85};
        if (fam == Family::Dx || fam == Family::D2) return {14.85, 14.95};
    } else {
        if (fam == Family::Dx || fam == Family::D2) return {16.0, 16.3};
        if (fam == Family::Dxy) return {16.7, 17.0};
        if (fam == Family::Cy) return {17.0, 17.3};
        if (fam == Family::C2) return {18.5, 18.7};
    }
    throw NonexistenceError("no known crossing for this family on the requested branch");
}

PeriodicSolution solve_family(const Options& o, const PotentialSpec& spec, Family fam,
                              double period, const std::vector<double>& seed) {
    if (fam == Family::FigureEight) {
        if (spec.kind == PotentialKind::Homogeneous)
            return figure_eight_homogeneous(spec.exponent, period);
        return lj_figure_eight(period, o.branch == "plus" ? +1 : -1);
    }
    if (!seed.empty()) {
        Eigen::VectorXd s = Eigen::Map<const Eigen::VectorXd>(seed.data(), seed.size());
        return newton_solve(spec, fam, period, s);
    }
    // no seed: run the bifurcation pipeline for this family's crossing and
    // continue the branch to the requested parameter value
    const BranchId id = parse_branch(o, spec);
    const auto [lo, hi] = default_bracket(spec, fam, id);
    BifurcationRecord rec = locate_crossing(id, lo, hi);
    rec = analyze_crossing(id, rec);
    const double target = spec.kind == PotentialKind::Homogeneous ? spec.exponent : period;
    for (const auto& c : rec.candidates) {
        if (c.solution.family != fam) continue;
        if ((target - rec.xi0) * c.side < 0) continue;
        return follow_family(id, c.solution, c.xi, target);
    }
    throw NonexistenceError("family not reached from its bifurcation point");
}

void write_tsv(const std::filesystem::path& path, const std::string& header,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream os(path);
    os << header << "\n";
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i) os << (i ? "\t" : "") << fmt(row[i]);
        os << "\n";
    }
}

std::vector<double> parse_grid_spec(const std::string& s) {
    // "lo:hi:step" or comma-separated values
    std::vector<double> grid;
    if (s.find(':') != std::string::npos) {
        double lo, hi, step;
        if (std::sscanf(s.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3 || step <= 0 || hi < lo)
            throw DomainError("bad grid spec: " + s);
        for (double x = lo; x <= hi + 1e-12 * step; x += step) grid.push_back(x);
    } else {
        std::stringstream ss(s);
        std::string tok;
        while (std::getline(ss, tok, ',')) grid.push_back(std::strtod(tok.c_str(), nullptr));
    }
    if (grid.empty()) throw DomainError("empty grid");
    return grid;
}

int cmd_solve(Options& o, const std::vector<double>& seed, const std::string& name) {
    const PotentialSpec spec = parse_potential(o);
    const auto fam = family_from_name(o.family);
    if (!fam) throw DomainError("unknown class: " + o.family);
    PeriodicSolution sol = solve_family(o, spec, *fam, o.period, seed);
    std::cout << family_name(sol.family) << " at " << potential_name(spec)
              << " T = " << fmt6(sol.period) << ": " << caption_tuple(sol) << "\n";
    std::cout << "  action = " << fmt(sol.action)
              << "  residual = " << fmt6(sol.residual_norm) << "\n";
    BranchStore store = open_store(o);
    const std::string key = name.empty() ? record_name(spec, o.family, sol.period) : name;
    store.put(key, to_record(sol));
    std::cout << "  stored as " << key << "\n";
    return kExitOk;
}

int cmd_index(Options& o, bool strict, bool check_convergence, const std::string& name) {
    const PotentialSpec spec = parse_potential(o);
    const auto fam = family_from_name(o.family);
    if (!fam) throw DomainError("unknown class: " + o.family);
    BranchStore store = open_store(o);
    PeriodicSolution sol;
    if (!name.empty() && store.contains(name))
        sol = solution_from_record(store.get(name));
    else
        sol = solve_family(o, spec, *fam, o.period, {});

    HessianOperator op = build_hessian(sol.spec, sol, o.ng);
    EigenSystem sys = eigen_decompose(op, std::min(24, 6 * o.ng));
    MorseIndexReport rep = morse_index(sys, o.tol_zero, strict);

    Record r;
    r.type = "morse_index";
    r.set("potential", potential_name(sol.spec));
    r.set("family", std::string(family_name(sol.family)));
    r.set("period", sol.period);
    r.set("grid_size", o.ng);
    r.set("index", rep.index);
    r.set("zero_modes", rep.zero_mode_count);
    r.set("zero_tol", rep.zero_tol);
    r.set("ambiguous", rep.ambiguous ? 1 : 0);
    r.set("eigenvalues", Eigen::VectorXd(sys.eigenvalues));
    if (check_convergence) {
        HessianOperator op2 = build_hessian(sol.spec, sol, 2 * o.ng);
        const Eigen::VectorXd v2 = hessian_eigenvalues(op2);
        Eigen::VectorXd change(10);
        for (int i = 0; i < 10; ++i)
            change[i] = std::abs(sys.eigenvalues[i] - v2[i]) /
                        std::max(1.0, std::abs(v2[i]));
        r.set("grid_convergence", change);
    }
    const std::string key = name.empty()
                                ? record_name(sol.spec, o.family, sol.period) + "_index"
                                : name;
    store.put(key, r);

    std::cout << "Morse index N = " << rep.index << ", zero modes = " << rep.zero_mode_count
              << (rep.ambiguous ? " (ambiguous)" : "") << "\n";
    std::cout << "lowest eigenvalues:";
    for (int i = 0; i < std::min<int>(12, sys.eigenvalues.size()); ++i)
        std::cout << " " << fmt6(sys.eigenvalues[i]);
    std::cout << "\nstored as " << key << "\n";
    return rep.ambiguous ? kExitAmbiguous : kExitOk;
}

int cmd_scan(Options& o, const std::string& grid_spec, const std::string& name) {
    const PotentialSpec spec = parse_potential(o);
    const BranchId id = parse_branch(o, spec);
    const std::vector<double> grid = parse_grid_spec(grid_spec);
    BranchScan scan = scan_index(id, grid, o.ng == 264 ? 0 : o.ng);

    BranchStore store = open_store(o);
    const std::string key =
        name.empty() ? ("scan_" + potential_name(spec) + "_" + o.branch) : name;
    store.put(key, to_record(scan));

    std::vector<std::vector<double>> rows;
    for (const auto& s : scan.samples) {
        std::vector<double> row{s.xi, static_cast<double>(s.report.index),
                                static_cast<double>(s.report.zero_mode_count)};
        for (int i = 0; i < s.lowest.size(); ++i) row.push_back(s.lowest[i]);
        rows.push_back(row);
    }
    write_tsv(out_dir(o, store) / (key + ".tsv"),
              "xi\tmorse_index\tzero_modes\tlambda_0..9", rows);

    auto brackets = index_change_brackets(scan);
    std::cout << "scanned " << scan.samples.size() << " points; index changes:";
    for (auto [lo, hi] : brackets) std::cout << " [" << fmt6(lo) << ", " << fmt6(hi) << "]";
    std::cout << "\n";
    for (const auto& note : scan.notes) std::cout << "note: " << note << "\n";
    std::cout << "stored as " << key << "\n";
    return kExitOk;
}

int cmd_bifurcate(Options& o, const std::string& bracket, const std::string& name) {
    const PotentialSpec spec = parse_potential(o);
    const BranchId id = parse_branch(o, spec);
    double lo, hi;
    if (std::sscanf(bracket.c_str(), "%lf,%lf", &lo, &hi) != 2 || hi <= lo)
        throw DomainError("--bracket expects lo,hi");
    BifurcationRecord rec;
    try {
        rec = locate_crossing(id, lo, hi);
    } catch (const DomainError& e) {
        std::cerr << e.what() << "\n";
        return kExitNonexistence;
    }
    rec = analyze_crossing(id, rec);
    const SignRelationReport sig = check_sign_relations(rec);

    BranchStore store = open_store(o);
    char xi_buf[32];
    std::snprintf(xi_buf, sizeof xi_buf,
                  spec.kind == PotentialKind::LennardJones ? "%.3f" : "%.4f", rec.xi0);
    const std::string key =
        name.empty()
            ? ((spec.kind == PotentialKind::LennardJones ? "lj-" : "homog-") + std::string(xi_buf))
            : name;
    store.put(key, to_record(rec));

    std::cout << "crossing at " << id.parameter_name() << "0 = " << fmt6(rec.xi0)
              << ", dN = " << rec.delta_n << ", degeneracy = " << rec.degeneracy
              << ", Q symmetry = " << q_symmetry_name(rec.q_symmetry)
              << ", side = " << side_name(rec.side) << ", N_B = " << rec.n_b << "\n";
    std::cout << "congruent counts:";
    for (int c : rec.congruent_counts) std::cout << " " << c;
    std::cout << "\nledger: " << (rec.ledger.counts_ok ? "ok" : "VIOLATION") << " ("
              << rec.ledger.detail << ")\n";
    std::cout << "sign relations: dS*lambda " << (sig.lambda_relation_ok ? "ok" : "VIOLATION")
              << ", dN*(xi-xi0)*dS " << (sig.side_relation_ok ? "ok" : "VIOLATION") << "\n";
    for (const auto& c : rec.candidates)
        std::cout << "  side " << (c.side < 0 ? "-" : "+") << " "
                  << family_name(c.solution.family) << " " << caption_tuple(c.solution)
                  << " dS = " << fmt6(c.delta_s) << "\n";
    std::cout << "stored as " << key << "\n";
    return kExitOk;
}

int cmd_follow(Options& o, const std::string& rec_name, double to_T, double to_a,
               const std::string& name) {
    BranchStore store = open_store(o);
    const Record r = store.get(rec_name);
    if (r.type != "bifurcation") throw DomainError("record is not a bifurcation record");
    const PotentialSpec spec = potential_from_name(r.text("potential"));
    const BranchId id = spec.kind == PotentialKind::Homogeneous
                            ? BranchId::homogeneous_family()
                            : BranchId::alpha(r.integer("alpha_sign"));
    const double target = spec.kind == PotentialKind::Homogeneous ? to_a : to_T;
    if (std::isnan(target)) throw DomainError("need --to-T (lj) or --to-a (homogeneous)");
    const auto want = family_from_name(o.family);

    const int n = r.integer("n_candidates");
    const double xi0 = r.number("xi0");
    for (int i = 0; i < n; ++i) {
        const std::string p = "candidate." + std::to_string(i) + ".";
        const auto fam = family_from_name(r.text(p + "family"));
        if (!fam) continue;
        if (want && *want != Family::FigureEight && *fam != *want) continue;
        const int side = r.integer(p + "side");
        if ((target - xi0) * side < 0) continue;
        const double xi = r.number(p + "xi");
        const double period = spec.kind == PotentialKind::Homogeneous ? 1.0 : xi;
        const PotentialSpec cspec =
            spec.kind == PotentialKind::Homogeneous ? PotentialSpec::homogeneous(xi) : spec;
        PeriodicSolution start = newton_solve(cspec, *fam, period, r.numbers(p + "params"));
        PeriodicSolution sol = follow_family(id, start, xi, target);
        std::cout << family_name(sol.family) << " at "
                  << (spec.kind == PotentialKind::Homogeneous ? "a" : "T") << " = "
                  << fmt6(target) << ": " << caption_tuple(sol) << "\n";
        std::cout << "  d = " << fmt6(sol.indices.d) << ", l = " << fmt6(sol.indices.l)
                  << ", dI = " << fmt6(sol.indices.delta_i) << "\n";
        const std::string key =
            name.empty() ? (rec_name + "_" + std::string(family_name(sol.family)) + "_followed")
                         : name;
        store.put(key, to_record(sol));
        std::cout << "stored as " << key << "\n";
        return kExitOk;
    }
    std::cerr << "no candidate of the requested class on that side\n";
    return kExitNonexistence;
}

int cmd_congruence(Options& o, const std::string& rec_name) {
    BranchStore store = open_store(o);
    const Record r = store.get(rec_name);
    if (r.type != "bifurcation") throw DomainError("record is not a bifurcation record");
    const PotentialSpec spec = potential_from_name(r.text("potential"));
    const int n = r.integer("n_candidates");
    std::vector<CandidateSolution> cands;
    for (int i = 0; i < n; ++i) {
        const std::string p = "candidate." + std::to_string(i) + ".";
        const auto fam = family_from_name(r.text(p + "family"));
        const double xi = r.number(p + "xi");
        const double period = spec.kind == PotentialKind::Homogeneous ? 1.0 : xi;
        const PotentialSpec cspec =
            spec.kind == PotentialKind::Homogeneous ? PotentialSpec::homogeneous(xi) : spec;
        CandidateSolution c;
        c.side = r.integer(p + "side");
        c.solution = newton_solve(cspec, *fam, period, r.numbers(p + "params"));
        cands.push_back(std::move(c));
    }
    int total_classes = 0;
    for (int side : {-1, +1}) {
        std::vector<CandidateSolution> side_cands;
        for (auto& c : cands)
            if (c.side == side) side_cands.push_back(c);
        if (side_cands.empty()) continue;
        auto cls = congruence_classes(side_cands);
        const int ncls = 1 + *std::max_element(cls.begin(), cls.end());
        total_classes += ncls;
        std::cout << "side " << (side < 0 ? "-" : "+") << ": " << side_cands.size()
                  << " solutions in " << ncls << " congruence class(es); sizes:";
        std::vector<int> counts(ncls, 0);
        for (int c : cls) ++counts[c];
        for (int c : counts) std::cout << " " << c;
        std::cout << "\n";
    }
    std::cout << "N_B = " << total_classes << " (|dN| = " << std::abs(r.integer("delta_n"))
              << ")\n";
    return kExitOk;
}

int cmd_ledger(Options& o, const std::string& rec_name) {
    BranchStore store = open_store(o);
    const Record r = store.get(rec_name);
    if (r.type != "bifurcation") throw DomainError("record is not a bifurcation record");
    const Eigen::VectorXd counts = r.numbers("congruent_counts");
    std::vector<int> n_i(counts.size());
    for (int i = 0; i < counts.size(); ++i) n_i[i] = static_cast<int>(counts[i]);
    BifurcationSide side = BifurcationSide::Unknown;
    const std::string s = r.text("side");
    if (s == "left") side = BifurcationSide::Left;
    if (s == "right") side = BifurcationSide::Right;
    if (s == "both") side = BifurcationSide::Both;
    const EulerLedgerCheck chk = euler_ledger_check(r.integer("delta_n"), side, n_i);
    std::cout << "ledger counts: " << (chk.counts_ok ? "ok" : "VIOLATION") << " (" << chk.detail
              << ")\n";
    return chk.counts_ok ? kExitOk : 1;
}

int cmd_map(Options& o, double energy, const std::vector<double>& center, double half_width,
            int nx, int ny, const std::string& name) {
    const PotentialSpec spec = parse_potential(o);
    if (spec.kind != PotentialKind::Homogeneous)
        throw DomainError("map: homogeneous potentials only");
    double cx, cy;
    if (center.size() == 2) {
        cx = center[0];
        cy = center[1];
    } else {
        // center on the figure-eight whose energy matches the restriction
        PeriodicSolution eight = figure_eight_homogeneous(spec.exponent, 1.0);
        const double e1 = conserved(spec, eight.state0).energy;
        const double c = e1 / energy;  // E scales as 1/length for a = 1
        if (spec.exponent != 1.0 || c <= 0)
            throw DomainError("map: pass --center for this configuration");
        cx = eight.params[0] * c;
        cy = eight.params[1] * c;
    }
    std::vector<double> xs(nx), ys(ny);
    for (int i = 0; i < nx; ++i)
        xs[i] = nx == 1 ? cx : cx - half_width + 2.0 * half_width * i / (nx - 1);
    for (int j = 0; j < ny; ++j)
        ys[j] = ny == 1 ? cy : cy - half_width + 2.0 * half_width * j / (ny - 1);
    SearchMap map = emit_search_map(spec, energy, xs, ys);

    BranchStore store = open_store(o);
    const std::string key = name.empty() ? "map_" + potential_name(spec) : name;
    const auto dir = out_dir(o, store);
    {
        std::vector<std::vector<double>> rows;
        for (const auto& p : map.points)
            rows.push_back({p.x, p.y, p.reachable ? 1.0 : 0.0, p.f1, p.f2, p.t_event});
        write_tsv(dir / (key + "_grid.tsv"), "x\ty\treachable\tf1\tf2\tt_event", rows);
    }
    for (int which : {1, 2}) {
        std::vector<std::vector<double>> rows;
        const auto& curves = which == 1 ? map.f1_curves : map.f2_curves;
        for (size_t ci = 0; ci < curves.size(); ++ci)
            for (const auto& pt : curves[ci])
                rows.push_back({static_cast<double>(ci), pt.x(), pt.y()});
        write_tsv(dir / (key + "_curve" + std::to_string(which) + ".tsv"), "curve\tx\ty", rows);
    }
    {
        std::vector<std::vector<double>> rows;
        for (const auto& pt : map.crossings) rows.push_back({pt.x(), pt.y()});
        write_tsv(dir / (key + "_crossings.tsv"), "x\ty", rows);
    }
    std::cout << "map: " << map.f1_curves.size() << " + " << map.f2_curves.size()
              << " zero curves, " << map.crossings.size() << " crossings\n";
    for (const auto& pt : map.crossings)
        std::cout << "  crossing at (" << fmt6(pt.x()) << ", " << fmt6(pt.y()) << ")\n";
    std::cout << "written to " << (dir / key).string() << "_*.tsv\n";
    return kExitOk;
}

int cmd_slice(Options& o, const std::string& range, int steps,
              const std::vector<double>& anchor_in, const std::string& name) {
    const PotentialSpec spec = parse_potential(o);
    const auto fam = family_from_name(o.family);
    if (!fam || *fam == Family::FigureEight)
        throw DomainError("slice: pass a bifurcated family class");
    double lo, hi;
    if (std::sscanf(range.c_str(), "%lf,%lf", &lo, &hi) != 2 || hi <= lo)
        throw DomainError("--range expects lo,hi");

    int frozen = 2, leftout = 1;  // triangle families: freeze v, report the
                                  // axis-body x velocity
    if (*fam == Family::D2 || *fam == Family::C2) {
        frozen = 0;  // collinear families: freeze x, report the velocity cross
        leftout = 2;
    }

    Eigen::VectorXd anchor;
    if (!anchor_in.empty()) {
        anchor = Eigen::Map<const Eigen::VectorXd>(anchor_in.data(), anchor_in.size());
    } else {
        const PeriodicSolution eight =
            spec.kind == PotentialKind::Homogeneous
                ? figure_eight_homogeneous(spec.exponent, o.period)
                : lj_figure_eight(o.period, o.branch == "plus" ? +1 : -1);
        anchor = trivial_representation(eight, *fam);
    }
    FamilySlice slice = emit_slice(spec, *fam, o.period, anchor, lo, hi, steps, frozen, leftout);

    BranchStore store = open_store(o);
    const std::string key =
        name.empty() ? ("slice_" + potential_name(spec) + "_" + o.family) : name;
    std::vector<std::vector<double>> rows;
    for (const auto& p : slice.points)
        rows.push_back({p.value, p.ok ? p.leftover : std::nan(""), p.ok ? 1.0 : 0.0});
    write_tsv(out_dir(o, store) / (key + ".tsv"), "value\tleftover\tok", rows);
    std::cout << "slice: " << slice.zeros.size() << " zero(s) at";
    for (double z : slice.zeros) std::cout << " " << fmt6(z);
    std::cout << "\nwritten to " << (out_dir(o, store) / (key + ".tsv")).string() << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"periodic three-body orbits, Morse indices, and bifurcations"};
    app.require_subcommand(1);
    Options o;
    app.add_option("--store", o.store_path, "record store directory (env CHOREO_STORE)");
    app.add_option("--out", o.out_dir, "output directory for plot data (default: store)");

    auto add_common = [&](CLI::App* c) {
        c->add_option("--potential", o.potential, "homog:<a> or lj");
        c->add_option("--class", o.family,
                      "family label (figure-eight, dxy, dx, d2, cx, c2, cy)");
        c->add_option("--T", o.period, "period");
        c->add_option("--a", o.a, "homogeneous exponent override");
        c->add_option("--branch", o.branch, "lj branch: minus or plus");
        c->add_option("--ng", o.ng, "spectral grid size");
        c->add_option("--tol-integration", o.tol_integration, "integrator relative tolerance");
        c->add_option("--tol-newton", o.tol_newton, "shooting tolerance");
        c->add_option("--tol-zero", o.tol_zero, "zero-mode threshold (0 = automatic)");
    };

    std::vector<double> seed, center, anchor;
    std::string name, grid_spec, bracket, range, rec_name;
    double to_T = std::numeric_limits<double>::quiet_NaN();
    double to_a = std::numeric_limits<double>::quiet_NaN();
    double energy = 0.0, half_width = 0.02;
    int nx = 41, ny = 41, steps = 60;
    bool strict = false, check_convergence = false;

    CLI::App* solve = app.add_subcommand("solve", "converge one periodic solution");
    add_common(solve);
    solve->add_option("--seed", seed, "shooting parameter seed");
    solve->add_option("--name", name, "record name");

    CLI::App* index = app.add_subcommand("index", "Morse index of a solution");
    add_common(index);
    index->add_flag("--strict", strict, "fail when an eigenvalue is near the zero threshold");
    index->add_flag("--check-convergence", check_convergence, "compare against a doubled grid");
    index->add_option("--name", name, "record name (reused as input when present)");

    CLI::App* scan = app.add_subcommand("scan", "Morse index along a branch");
    add_common(scan);
    scan->add_option("--grid", grid_spec, "lo:hi:step or comma list")->required();
    scan->add_option("--name", name, "record name");

    CLI::App* bif = app.add_subcommand("bifurcate", "locate and analyze an index change");
    add_common(bif);
    bif->add_option("--bracket", bracket, "lo,hi bracket of the crossing")->required();
    bif->add_option("--name", name, "record name");

    CLI::App* follow = app.add_subcommand("follow", "continue a bifurcated family");
    add_common(follow);
    follow->add_option("--record", rec_name, "bifurcation record name")->required();
    follow->add_option("--to-T", to_T, "target period (lj)");
    follow->add_option("--to-a", to_a, "target exponent (homogeneous)");
    follow->add_option("--name", name, "record name");

    CLI::App* cong = app.add_subcommand("congruence", "congruence classes of candidates");
    add_common(cong);
    cong->add_option("--record", rec_name, "bifurcation record name")->required();

    CLI::App* ledger = app.add_subcommand("ledger", "Euler-characteristic count restrictions");
    add_common(ledger);
    ledger->add_option("--record", rec_name, "bifurcation record name")->required();

    CLI::App* map = app.add_subcommand("map", "two-condition search map at fixed energy");
    add_common(map);
    map->add_option("--energy", energy, "total energy restriction")->required();
    map->add_option("--center", center, "grid center x,y (default: matching figure-eight)");
    map->add_option("--half-width", half_width, "grid half width");
    map->add_option("--nx", nx, "grid points in x");
    map->add_option("--ny", ny, "grid points in y");
    map->add_option("--name", name, "output name");

    CLI::App* slice = app.add_subcommand("slice", "one-parameter sweep of a leftover condition");
    add_common(slice);
    slice->add_option("--range", range, "lo,hi sweep range")->required();
    slice->add_option("--steps", steps, "sweep steps");
    slice->add_option("--anchor", anchor, "inner-solve anchor parameters");
    slice->add_option("--name", name, "output name");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitBadConfig;
    }

    try {
        if (solve->parsed()) return cmd_solve(o, seed, name);
        if (index->parsed()) return cmd_index(o, strict, check_convergence, name);
        if (scan->parsed()) return cmd_scan(o, grid_spec, name);
        if (bif->parsed()) return cmd_bifurcate(o, bracket, name);
        if (follow->parsed()) return cmd_follow(o, rec_name, to_T, to_a, name);
        if (cong->parsed()) return cmd_congruence(o, rec_name);
        if (ledger->parsed()) return cmd_ledger(o, rec_name);
        if (map->parsed()) return cmd_map(o, energy, center, half_width, nx, ny, name);
        if (slice->parsed()) return cmd_slice(o, range, steps, anchor, name);
    } catch (const NonexistenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNonexistence;
    } catch (const ConvergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNoConvergence;
    } catch (const SingularJacobianError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNoConvergence;
    } catch (const NumericalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNoConvergence;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadConfig;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitBadConfig;
}
