#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "c0dyn/io.hpp"
#include "c0dyn/witness.hpp"

using nlohmann::json;
using namespace c0dyn;

namespace {

std::string rat(const Rational& r) { return io::to_string(r); }

json measure_json(const MeasureValue& v) {
    if (v.is_exact()) return json{{"exact", rat(v.value())}};
    return json{{"lo", rat(v.lower())}, {"hi", rat(v.upper())}};
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + out_path + "' for writing");
    f << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

struct ScheduleOptions {
    std::int64_t k_max = 6;
    std::int64_t m_max = 3;
    std::int64_t search_cap = std::int64_t{1} << 20;
    std::string slack_cap;

    std::shared_ptr<const WitnessSchedule> build() const {
        std::optional<Rational> cap;
        if (!slack_cap.empty()) cap = Rational::parse(slack_cap);
        return build_schedule(k_max, m_max, search_cap, cap);
    }
};

void add_schedule_options(CLI::App* sub, ScheduleOptions& opts) {
    sub->add_option("--kmax", opts.k_max, "schedule depth");
    sub->add_option("--mmax", opts.m_max, "widest certified shift window");
    sub->add_option("--search-cap", opts.search_cap, "index search limit");
    sub->add_option("--slack-cap", opts.slack_cap, "clamp every slack budget to this value");
}

// rect literals only need a schedule when they mention one
Rectangle parse_rect_arg(const std::string& lit, const ScheduleOptions& opts,
                         std::shared_ptr<const WitnessSchedule>& cache) {
    if (lit.find("schedule(") != std::string::npos && !cache) cache = opts.build();
    return io::parse_rectangle(lit, cache);
}

json fc_json(const FcCheckResult& res) {
    json j;
    j["target"] = io::to_string(res.target);
    j["radius"] = res.window.radius;
    j["certified"] = res.certified;
    j["zero_measure"] = res.zero_measure;
    j["refuted_index"] = res.refuted_index ? json(*res.refuted_index) : json(nullptr);
    j["factor_lower_bounds"] = json::array();
    for (const auto& l : res.factor_lower_bounds) j["factor_lower_bounds"].push_back(rat(l));
    j["tail_epsilons"] = json::array();
    for (const auto& [n0, eps] : res.tail_epsilons)
        j["tail_epsilons"].push_back(json::array({n0, rat(eps)}));
    j["tail_product_lower"] =
        res.tail_product_lower ? json(rat(*res.tail_product_lower)) : json(nullptr);
    return j;
}

json schedule_json(const WitnessSchedule& s) {
    json cells = json::array();
    for (std::int64_t k = 1; k <= s.k_max(); ++k) {
        for (std::int64_t m = 1; m <= s.m_max(); ++m) {
            const auto& e = s.at(k, m);
            cells.push_back({{"k", k},
                             {"m", m},
                             {"n", e.n},
                             {"slack", rat(e.slack)},
                             {"exp_lo", rat(e.exp_enclosure.lo)},
                             {"exp_hi", rat(e.exp_enclosure.hi)},
                             {"max_symdiff", rat(e.max_symdiff)}});
        }
    }
    return json{{"k_max", s.k_max()}, {"m_max", s.m_max()}, {"cells", cells}};
}

// Re-derives every certificate in a serialized schedule from scratch:
// endpoint arithmetic, a fresh tighter enclosure bracketed by the stored
// one, the exact worst symmetric difference, and minimality of the index.
std::vector<std::string> verify_schedule_json(const json& doc) {
    std::vector<std::string> failures;
    auto expect = [&](bool ok, std::int64_t k, std::int64_t m, const std::string& what) {
        if (!ok)
            failures.push_back("cell k=" + std::to_string(k) + " m=" + std::to_string(m) +
                               ": " + what);
    };
    for (const auto& cell : doc.at("cells")) {
        const std::int64_t k = cell.at("k").get<std::int64_t>();
        const std::int64_t m = cell.at("m").get<std::int64_t>();
        const std::int64_t n = cell.at("n").get<std::int64_t>();
        const Rational slack = Rational::parse(cell.at("slack").get<std::string>());
        const Rational lo = Rational::parse(cell.at("exp_lo").get<std::string>());
        const Rational hi = Rational::parse(cell.at("exp_hi").get<std::string>());
        const Rational s = Rational::parse(cell.at("max_symdiff").get<std::string>());
        if (k < 1 || m < 1 || n < 1 || lo >= hi) {
            expect(false, k, m, "malformed cell");
            continue;
        }
        const Rational x(1, m * (std::int64_t{1} << k));
        const Enclosure fresh = exp_neg_enclosure(x, (hi - lo) / Rational(2));
        expect(lo <= fresh.lo && fresh.hi <= hi, k, m, "stored enclosure fails bracketing");
        expect(slack <= Rational(1) - lo, k, m, "slack exceeds its enclosure budget");
        expect(s == max_symdiff(n, m), k, m, "stored worst symmetric difference is wrong");
        expect(s <= slack, k, m, "index does not meet the slack budget");
        expect(n == 1 || max_symdiff(n - 1, m) > slack, k, m, "index is not minimal");
    }
    return failures;
}

struct ReportConfig {
    ScheduleOptions sched;
    std::int64_t n_max = 8;
    std::int64_t d_max = 8;
    std::int64_t g_max = 8;
    std::int64_t depth = 6;
    std::int64_t family_n = 8;
    std::int64_t cover_radius = 2;
    std::string rotation_theta = "1/3";
    std::string c0_eps = "1/32";
    std::string out_dir = "c0dyn_report";
};

ReportConfig load_config(const std::string& path) {
    ReportConfig cfg;
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot read config '" + path + "'");
    std::string line;
    std::size_t lineno = 0;
    auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t");
        const auto b = s.find_last_not_of(" \t");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    while (std::getline(f, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        const std::string entry = trim(line);
        if (entry.empty()) continue;
        const auto eq = entry.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected key = value");
        const std::string key = trim(entry.substr(0, eq));
        const std::string value = trim(entry.substr(eq + 1));
        auto int_value = [&]() -> std::int64_t {
            try {
                std::size_t pos = 0;
                const auto v = std::stoll(value, &pos);
                if (pos != value.size()) throw std::invalid_argument(value);
                return v;
            } catch (...) {
                throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                         ": bad integer '" + value + "'");
            }
        };
        if (key == "kmax") cfg.sched.k_max = int_value();
        else if (key == "mmax") cfg.sched.m_max = int_value();
        else if (key == "search_cap") cfg.sched.search_cap = int_value();
        else if (key == "slack_cap") cfg.sched.slack_cap = value;
        else if (key == "nmax") cfg.n_max = int_value();
        else if (key == "dmax") cfg.d_max = int_value();
        else if (key == "gmax") cfg.g_max = int_value();
        else if (key == "depth") cfg.depth = int_value();
        else if (key == "family_n") cfg.family_n = int_value();
        else if (key == "cover_radius") cfg.cover_radius = int_value();
        else if (key == "rotation_theta") cfg.rotation_theta = value;
        else if (key == "c0_eps") cfg.c0_eps = value;
        else if (key == "out_dir") cfg.out_dir = value;
        else
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": unknown key '" + key + "'");
    }
    return cfg;
}

std::string mixing_scan_csv(const BaseSet& a, const BaseSet& b, std::int64_t d_max,
                            std::int64_t threshold) {
    std::string csv = "d,nu,product,beyond_threshold\n";
    const Rational product = nu(a) * nu(b);
    for (std::int64_t d = 0; d <= d_max; ++d) {
        const Rational v = nu(boolean(BoolOp::intersect, act(GroupElement::shift(d), a), b));
        csv += std::to_string(d) + "," + rat(v) + "," + rat(product) + "," +
               (d >= threshold ? "1" : "0") + "\n";
    }
    return csv;
}

json mixing_scan_json(const BaseSet& a, const BaseSet& b, std::int64_t d_max,
                      std::int64_t threshold) {
    json rows = json::array();
    for (std::int64_t d = 0; d <= d_max; ++d) {
        const Rational v = nu(boolean(BoolOp::intersect, act(GroupElement::shift(d), a), b));
        rows.push_back({{"d", d}, {"nu", rat(v)}, {"beyond", d >= threshold}});
    }
    return json{{"threshold", threshold},
                {"product", rat(nu(a) * nu(b))},
                {"rows", rows}};
}

std::string ai_table_csv(std::int64_t n_max, std::int64_t d_max) {
    std::string csv = "n,d,overlap,symdiff\n";
    for (std::int64_t n = 1; n <= n_max; ++n)
        for (std::int64_t d = 0; d <= d_max; ++d)
            csv += std::to_string(n) + "," + std::to_string(d) + "," + rat(overlap(n, d)) +
                   "," + rat(symdiff_shift(n, d)) + "\n";
    return csv;
}

std::string c0_scan_csv(const Rectangle& a, const Rectangle& b, std::int64_t g_max,
                        std::int64_t depth) {
    std::string csv = "g,truncated,lo,hi\n";
    for (std::int64_t g = -g_max; g <= g_max; ++g) {
        const auto res = c0_eval(GroupElement::shift(g), a, b, depth);
        csv += std::to_string(g) + "," + rat(res.truncated) + "," + rat(res.infinite.lower()) +
               "," + rat(res.infinite.upper()) + "\n";
    }
    return csv;
}

int run_report(const ReportConfig& cfg) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    std::vector<std::string> lines;
    int failures = 0;
    auto ok = [&](const std::string& name, const std::string& fact) {
        lines.push_back("ok " + name + (fact.empty() ? "" : " " + fact));
    };
    auto fail = [&](const std::string& name, const std::string& why) {
        lines.push_back("FAIL " + name + ": " + why);
        ++failures;
    };
    auto write = [&](const char* name, const std::string& text) {
        emit(text, (fs::path(cfg.out_dir) / name).string());
    };
    auto guarded = [&](const char* name, auto&& body) {
        try {
            body();
        } catch (const std::exception& e) {
            fail(name, e.what());
        }
    };

    guarded("mixing_scan", [&] {
        const BaseSet a{MajoritySet(1)};
        const BaseSet b = boolean(BoolOp::intersect, BaseSet(CylinderUnion::single(0, true)),
                                  BaseSet(CylinderUnion::single(1, false)));
        const std::int64_t r = mixing_threshold(a, b);
        write("mixing_scan.csv", mixing_scan_csv(a, b, cfg.d_max, r));
        bool exact = true;
        for (std::int64_t d = r; d <= cfg.d_max; ++d)
            exact &= nu(boolean(BoolOp::intersect, act(GroupElement::shift(d), a), b)) ==
                     nu(a) * nu(b);
        if (exact)
            ok("mixing_scan", "rows=" + std::to_string(cfg.d_max + 1) +
                                  " threshold=" + std::to_string(r));
        else
            fail("mixing_scan", "product rule violated beyond the threshold");
    });

    guarded("ai_table", [&] {
        write("ai_table.csv", ai_table_csv(cfg.n_max, cfg.d_max));
        bool monotone = true;
        for (std::int64_t d = 0; d <= cfg.d_max; ++d)
            for (std::int64_t n = 1; n < cfg.n_max; ++n)
                monotone &= symdiff_shift(n + 1, d) <= symdiff_shift(n, d);
        if (monotone)
            ok("ai_table", "rows=" + std::to_string(cfg.n_max * (cfg.d_max + 1)));
        else
            fail("ai_table", "symmetric difference not monotone in the index");
    });

    std::shared_ptr<const WitnessSchedule> sched;
    try {
        sched = cfg.sched.build();
        write("schedule_certificates.json", dump(schedule_json(*sched)));
        ok("schedule", "k_max=" + std::to_string(sched->k_max()) +
                           " m_max=" + std::to_string(sched->m_max()));
    } catch (const std::exception& e) {
        fail("schedule", e.what());
    }

    if (sched) {
        const auto bad = verify_schedule_json(schedule_json(*sched));
        if (bad.empty())
            ok("schedule_verify",
               "cells=" + std::to_string(sched->k_max() * sched->m_max()));
        else
            fail("schedule_verify", bad.front());
    } else {
        fail("schedule_verify", "no schedule");
    }

    if (sched) guarded("coefficients", [&] {
        std::string csv = "m,g,depth,status,lower,upper\n";
        bool floors = true;
        for (std::int64_t m = 1; m <= sched->m_max(); ++m) {
            const Rational floor =
                exp_neg_enclosure(Rational(1, m), Rational::pow2(-10)).lo;
            for (std::int64_t g = 1; g <= sched->m_max(); ++g) {
                const auto c = coefficient(GroupElement::shift(g), m, sched->k_max(), sched);
                csv += std::to_string(m) + "," + std::to_string(g) + "," +
                       std::to_string(sched->k_max()) + "," +
                       (g <= m ? "certified" : "evaluated") + "," + rat(c.lower()) + "," +
                       rat(c.upper()) + "\n";
                if (g <= m) floors &= c.lower() >= floor;
            }
        }
        write("coefficients.csv", csv);
        if (floors)
            ok("coefficients", "floor_checks=" +
                                   std::to_string(sched->m_max() * (sched->m_max() + 1) / 2));
        else
            fail("coefficients", "certified lower bound under the exponential floor");
    });
    else fail("coefficients", "no schedule");

    guarded("c0_scan", [&] {
        const Rectangle half({}, TailContext::half(BaseSet(CylinderUnion::single(0, true))));
        write("c0_scan.csv", c0_scan_csv(half, half, cfg.g_max, cfg.depth));
        bool vanishing = true;
        for (std::int64_t g = 1; g <= cfg.g_max; ++g)
            vanishing &= c0_eval(GroupElement::shift(g), half, half, cfg.depth).infinite ==
                         MeasureValue::exact(Rational(0));
        const CompactWindow w =
            c0_threshold(half, half, Rational::parse(cfg.c0_eps), cfg.depth);
        if (vanishing)
            ok("c0_scan", "rows=" + std::to_string(2 * cfg.g_max + 1) +
                              " eps_radius=" + std::to_string(w.radius));
        else
            fail("c0_scan", "shifted overlap fails to vanish");
    });

    guarded("non_sigma_finite", [&] {
        const auto family =
            disjoint_family(cfg.family_n, BaseSet(CylinderUnion::single(0, true)));
        const std::size_t pieces = family.pieces().size();
        bool unit = true;
        for (const auto& p : family.pieces()) unit &= rect_measure(p) == Rational(1);
        write("non_sigma_finite.json",
              dump(json{{"coordinates", cfg.family_n},
                        {"pieces", pieces},
                        {"certificates", family.certificates().size()},
                        {"mu_each", "1/1"},
                        {"mu_total", rat(mu(family))}}));
        if (unit && pieces == (std::size_t{1} << cfg.family_n) &&
            family.certificates().size() == pieces * (pieces - 1) / 2)
            ok("non_sigma_finite", "pieces=" + std::to_string(pieces));
        else
            fail("non_sigma_finite", "family is not a certified disjoint unit-measure set");
    });

    guarded("rotation", [&] {
        const Rational theta = Rational::parse(cfg.rotation_theta);
        const BaseSet half{ArcUnion::interval(Rational(0), Rational(1, 2))};
        const auto rep = rotation_counterexample(theta, half, cfg.depth);
        write("rotation.json", dump(json{{"theta", rat(rep.theta)},
                                         {"overlap_nu", rat(rep.overlap_nu)},
                                         {"factor", rat(rep.factor)},
                                         {"depth", cfg.depth},
                                         {"truncated", rat(rep.truncated)},
                                         {"infinite", measure_json(rep.infinite)}}));
        const bool moved = !rep.theta.is_zero();
        if (rep.truncated == rep.factor.pow(static_cast<unsigned long>(cfg.depth)) &&
            rep.infinite == MeasureValue::exact(moved ? Rational(0) : Rational(1)))
            ok("rotation", "theta=" + rat(rep.theta));
        else
            fail("rotation", "report inconsistent with its factor");
    });

    if (sched) guarded("fc_checks", [&] {
        json arr = json::array();
        bool good = true;
        for (std::int64_t m = 1; m <= sched->m_max(); ++m) {
            const auto res =
                fc_check(witness_support(sched, m), CompactWindow::shifts(m));
            json j = fc_json(res);
            j["kind"] = "witness_support";
            arr.push_back(j);
            good &= res.certified && !res.zero_measure;
        }
        const Rectangle constant({},
                                 TailContext::half(BaseSet(CylinderUnion::single(0, true))));
        const auto refuted = fc_check(constant, CompactWindow::shifts(1));
        json jr = fc_json(refuted);
        jr["kind"] = "constant_cylinder";
        arr.push_back(jr);
        good &= !refuted.certified && refuted.refuted_index == 1;

        const Rectangle left({BaseSet(MajoritySet(1))}, TailContext::schedule(sched, 1));
        const Rectangle right({BaseSet(MajoritySet(1, 1))}, TailContext::schedule(sched, 1));
        const auto assembled =
            fc_intersection_assembly(fc_check(left, CompactWindow::shifts(1)),
                                     fc_check(right, CompactWindow::shifts(1)));
        json ja = fc_json(assembled);
        ja["kind"] = "intersection_assembly";
        arr.push_back(ja);
        good &= assembled.certified;

        write("fc_checks.json", dump(arr));
        if (good)
            ok("fc_checks", "certified=" + std::to_string(sched->m_max() + 1) + " refuted=1");
        else
            fail("fc_checks", "certificate battery came out wrong");
    });
    else fail("fc_checks", "no schedule");

    if (sched) guarded("cover", [&] {
        const auto pieces = sigma_finite_cover(sched, cfg.cover_radius, sched->m_max());
        json lits = json::array();
        bool unit = true;
        for (const auto& p : pieces) {
            lits.push_back(io::to_string(p));
            unit &= rect_measure(p) == Rational(1);
        }
        write("cover.json", dump(json{{"radius", cfg.cover_radius},
                                      {"m_used", sched->m_max()},
                                      {"count", pieces.size()},
                                      {"mu_each", "1/1"},
                                      {"pieces", lits}}));
        if (unit && pieces.size() ==
                        static_cast<std::size_t>((2 * cfg.cover_radius + 1) * sched->m_max()))
            ok("cover", "pieces=" + std::to_string(pieces.size()));
        else
            fail("cover", "cover enumeration inconsistent");
    });
    else fail("cover", "no schedule");

    std::string summary;
    for (const auto& l : lines) summary += l + "\n";
    summary += failures == 0 ? "all checks passed\n"
                             : std::to_string(failures) + " checks failed\n";
    write("summary.txt", summary);
    std::cout << summary;
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact arithmetic for shift actions on infinite product measure spaces"};
    app.require_subcommand(1);
    int exit_code = 0;

    auto* mixing = app.add_subcommand("mixing-scan", "overlap of a shifted pair of base sets");
    {
        static std::string a_lit, b_lit, format = "csv", out;
        static std::int64_t d_max = 8;
        mixing->add_option("--a", a_lit, "base set literal")->required();
        mixing->add_option("--b", b_lit, "base set literal")->required();
        mixing->add_option("--dmax", d_max, "largest shift");
        mixing->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));
        mixing->add_option("--out", out, "write to file instead of stdout");
        mixing->callback([&] {
            const BaseSet a = io::parse_base_set(a_lit);
            const BaseSet b = io::parse_base_set(b_lit);
            const std::int64_t r = mixing_threshold(a, b);
            emit(format == "csv" ? mixing_scan_csv(a, b, d_max, r)
                                 : dump(mixing_scan_json(a, b, d_max, r)),
                 out);
        });
    }

    auto* table = app.add_subcommand("ai-table", "overlap and symmetric difference table");
    {
        static std::int64_t n_max = 8, d_max = 8;
        static std::string out;
        table->add_option("--nmax", n_max, "largest index");
        table->add_option("--dmax", d_max, "largest shift");
        table->add_option("--out", out, "write to file instead of stdout");
        table->callback([&] { emit(ai_table_csv(n_max, d_max), out); });
    }

    auto* mu_cmd = app.add_subcommand("mu", "measure of a rectangle or a set expression");
    {
        static std::string rect_lit, with_lit, op, format = "text";
        static ScheduleOptions opts;
        mu_cmd->add_option("--rect", rect_lit, "rectangle literal")->required();
        mu_cmd->add_option("--op", op)->check(CLI::IsMember({"intersect", "minus", "sqcup"}));
        mu_cmd->add_option("--with", with_lit, "second rectangle literal");
        mu_cmd->add_option("--format", format)->check(CLI::IsMember({"text", "json"}));
        add_schedule_options(mu_cmd, opts);
        mu_cmd->callback([&] {
            std::shared_ptr<const WitnessSchedule> cache;
            const Rectangle a = parse_rect_arg(rect_lit, opts, cache);
            if (op.empty() != with_lit.empty())
                throw CLI::ValidationError("--op and --with go together");
            Rational value;
            std::size_t pieces = 1;
            if (op.empty()) {
                value = rect_measure(a);
            } else {
                const Rectangle b = parse_rect_arg(with_lit, opts, cache);
                SetExpr expr = op == "intersect"
                                   ? SetExpr::intersect(SetExpr::leaf(a), SetExpr::leaf(b))
                               : op == "minus"
                                   ? SetExpr::minus(SetExpr::leaf(a), SetExpr::leaf(b))
                                   : SetExpr::disjoint_union(SetExpr::leaf(a), SetExpr::leaf(b));
                const RingSet ring = ring_normalize(expr);
                value = mu(ring);
                pieces = ring.pieces().size();
            }
            if (format == "json")
                std::cout << dump(json{{"mu", rat(value)}, {"pieces", pieces}});
            else
                std::cout << "mu = " << rat(value) << " (" << pieces << " piece"
                          << (pieces == 1 ? "" : "s") << ")\n";
        });
    }

    auto* scan = app.add_subcommand("c0-scan", "diagonal shift overlaps of two rectangles");
    {
        static std::string a_lit, b_lit, out, eps = "1/32";
        static std::int64_t g_max = 8, depth = 6;
        static ScheduleOptions opts;
        scan->add_option("--a", a_lit, "rectangle literal")->required();
        scan->add_option("--b", b_lit, "rectangle literal")->required();
        scan->add_option("--gmax", g_max, "largest |shift|");
        scan->add_option("--depth", depth, "evaluation depth");
        scan->add_option("--eps", eps, "vanishing tolerance for the window summary");
        scan->add_option("--out", out, "write csv to file instead of stdout");
        add_schedule_options(scan, opts);
        scan->callback([&] {
            std::shared_ptr<const WitnessSchedule> cache;
            const Rectangle a = parse_rect_arg(a_lit, opts, cache);
            const Rectangle b = parse_rect_arg(b_lit, opts, cache);
            emit(c0_scan_csv(a, b, g_max, depth), out);
            if (a.model() == Model::bernoulli) {
                try {
                    const CompactWindow w = c0_threshold(a, b, Rational::parse(eps), depth);
                    std::cerr << "overlap <= " << eps << " beyond radius " << w.radius << "\n";
                } catch (const std::exception& e) {
                    std::cerr << "no window certificate: " << e.what() << "\n";
                }
            }
        });
    }

    auto* family = app.add_subcommand("non-sigma-finite",
                                      "certified disjoint unit-measure rectangle family");
    {
        static std::int64_t n = 8;
        static std::string set_lit = "cyl 0:1", out;
        family->add_option("--n", n, "pattern coordinates, 2^n rectangles");
        family->add_option("--set", set_lit, "half-measure base set literal");
        family->add_option("--out", out, "write json to file instead of stdout");
        family->callback([&] {
            const auto ring = disjoint_family(n, io::parse_base_set(set_lit));
            emit(dump(json{{"coordinates", n},
                           {"pieces", ring.pieces().size()},
                           {"certificates", ring.certificates().size()},
                           {"mu_total", rat(mu(ring))}}),
                 out);
        });
    }

    auto* witness = app.add_subcommand("witness", "schedule certificates and their uses");
    witness->require_subcommand(1);

    auto* build = witness->add_subcommand("build", "construct and print the schedule");
    {
        static ScheduleOptions opts;
        static std::string out;
        add_schedule_options(build, opts);
        build->add_option("--out", out, "write json to file instead of stdout");
        build->callback([&] { emit(dump(schedule_json(*opts.build())), out); });
    }

    auto* verify = witness->add_subcommand("verify", "re-derive a serialized schedule");
    {
        static std::string certs;
        verify->add_option("--certs", certs, "schedule json file")->required();
        verify->callback([&] {
            std::ifstream f(certs);
            if (!f) throw std::runtime_error("cannot read '" + certs + "'");
            json doc = json::parse(f);
            const auto failures = verify_schedule_json(doc);
            for (const auto& msg : failures) std::cout << "FAIL " << msg << "\n";
            std::cout << (failures.empty() ? "ok" : "FAILED") << ": "
                      << doc.at("cells").size() << " cells, " << failures.size()
                      << " failures\n";
            if (!failures.empty()) exit_code = 1;
        });
    }

    auto* coeff = witness->add_subcommand("coeff", "certified matrix coefficient bounds");
    {
        static ScheduleOptions opts;
        static std::int64_t m = 1, g = 1, depth = 6;
        coeff->add_option("--m", m, "witness index")->required();
        coeff->add_option("--g", g, "group shift")->required();
        coeff->add_option("--depth", depth, "exact evaluation depth");
        add_schedule_options(coeff, opts);
        coeff->callback([&] {
            auto sched = opts.build();
            if (depth > sched->k_max()) depth = sched->k_max();
            const auto c = coefficient(GroupElement::shift(g), m, depth, sched);
            std::cout << io::to_string(c) << "\n";
            char approx[64];
            std::snprintf(approx, sizeof approx, "~ [%.6f, %.6f]", c.lower().to_double(),
                          c.upper().to_double());
            std::cout << approx << "\n";
        });
    }

    auto* fc = witness->add_subcommand("fc-check", "uniform factor convergence certificate");
    {
        static ScheduleOptions opts;
        static std::string rect_lit;
        static std::int64_t radius = 1;
        fc->add_option("--rect", rect_lit, "rectangle literal")->required();
        fc->add_option("--radius", radius, "shift window radius");
        add_schedule_options(fc, opts);
        fc->callback([&] {
            std::shared_ptr<const WitnessSchedule> cache;
            const Rectangle a = parse_rect_arg(rect_lit, opts, cache);
            std::cout << dump(fc_json(fc_check(a, CompactWindow::shifts(radius))));
        });
    }

    auto* rot = witness->add_subcommand("rotation", "diagonal rotation stays away from zero");
    {
        static std::string theta = "1/3", arcs = "arc 0/1 1/2";
        static std::int64_t depth = 6;
        rot->add_option("--theta", theta, "rotation angle");
        rot->add_option("--depth", depth, "truncation depth");
        rot->add_option("--arcs", arcs, "half-measure arc literal");
        rot->callback([&] {
            const auto rep =
                rotation_counterexample(Rational::parse(theta), io::parse_base_set(arcs), depth);
            std::cout << dump(json{{"theta", rat(rep.theta)},
                                   {"overlap_nu", rat(rep.overlap_nu)},
                                   {"factor", rat(rep.factor)},
                                   {"truncated", rat(rep.truncated)},
                                   {"infinite", measure_json(rep.infinite)}});
        });
    }

    auto* cover = witness->add_subcommand("cover", "shifted witness supports of measure one");
    {
        static ScheduleOptions opts;
        static std::int64_t radius = 2, m_used = 0;
        cover->add_option("--radius", radius, "largest |shift|");
        cover->add_option("--mused", m_used, "witness indices to include (default all)");
        add_schedule_options(cover, opts);
        cover->callback([&] {
            auto sched = opts.build();
            const std::int64_t m = m_used == 0 ? sched->m_max() : m_used;
            const auto pieces = sigma_finite_cover(sched, radius, m);
            std::cout << pieces.size() << " pieces, mu = 1 each\n";
            for (const auto& p : pieces) std::cout << io::to_string(p) << "\n";
        });
    }

    auto* report = app.add_subcommand("report", "full deterministic artifact battery");
    {
        static std::string config_path, out_dir;
        report->add_option("--config", config_path, "flat key = value file");
        report->add_option("--out", out_dir, "artifact directory");
        report->callback([&] {
            ReportConfig cfg =
                config_path.empty() ? ReportConfig{} : load_config(config_path);
            if (const char* env = std::getenv("C0DYN_OUT_DIR")) cfg.out_dir = env;
            if (!out_dir.empty()) cfg.out_dir = out_dir;
            exit_code = run_report(cfg);
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return exit_code;
}
