#include "quadrank/run.hpp"

#include "quadrank/arith.hpp"
#include "quadrank/cache.hpp"
#include "quadrank/census.hpp"
#include "quadrank/classgroup.hpp"
#include "quadrank/errors.hpp"
#include "quadrank/localize.hpp"
#include "quadrank/specialize.hpp"

#include <cmath>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace quadrank {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

mpz_class parse_integer(const std::string& text) {
    mpz_class v;
    std::string t = text;
    if (!t.empty() && t[0] == '+') t.erase(0, 1);
    if (t.empty() || v.set_str(t, 10) != 0) throw usage_error("not an integer: '" + text + "'");
    return v;
}

fs::path cache_dir(const config::RunConfig& cfg) {
    return cfg.cache_dir.empty() ? cache::default_cache_dir() : fs::path(cfg.cache_dir);
}

/// Writes to the output file atomically, or to `out`.
void emit(const config::RunConfig& cfg, std::ostream& out, const std::string& text) {
    if (cfg.output.empty()) {
        out << text;
        out.flush();
        return;
    }
    fs::path path(cfg.output);
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::trunc | std::ios::binary);
        if (!f) throw usage_error("cannot write output " + cfg.output);
        f << text;
    }
    fs::rename(tmp, path);
}

std::set<unsigned long> bad_primes(const config::RunConfig& cfg, const specialize::CurveSpec& curve) {
    if (cfg.bad_primes == "auto") return specialize::discriminant_primes(curve.f);
    if (cfg.bad_primes == "none" || cfg.bad_primes.empty()) return {};
    auto S = localize::parse_places(cfg.bad_primes);
    if (S.archimedean) throw usage_error("--bad-primes takes finite primes only");
    return S.finite_primes;
}

specialize::EnumerationOptions enumeration_options(const config::RunConfig& cfg, const specialize::CurveSpec& curve) {
    specialize::EnumerationOptions o;
    o.sign = specialize::parse_sign(cfg.sign);
    o.bad_primes = bad_primes(cfg, curve);
    o.height_bound = cfg.height_bound;
    o.workers = cfg.workers;
    return o;
}

ordered_json structure_json(const mpz_class& d, const classgroup::AbelianGroupStructure& g, bool narrow) {
    ordered_json j;
    j["d"] = d.fits_slong_p() ? json(d.get_si()) : json(d.get_str());
    j["group"] = narrow ? "narrow" : "form";
    j["h"] = g.order();
    j["divisors"] = g.elementary_divisors;
    for (unsigned m : {2u, 3u, 5u, 7u}) j["rk" + std::to_string(m)] = classgroup::m_rank(g, m);
    return j;
}

int cmd_factor(const config::RunConfig& cfg, std::ostream& out, std::ostream& log) {
    auto n = parse_integer(cfg.number);
    if (n == 0) throw usage_error("factor: n must be nonzero");
    cache::FactorCache fc(cache_dir(cfg));
    if (fc.rejected()) log << "factor cache: dropped " << fc.rejected() << " invalid entries\n";
    auto f = fc.factor(n);
    emit(cfg, out, n.get_str() + " = " + arith::to_string(f) + "\n");
    return kExitOk;
}

int cmd_kfree(const config::RunConfig& cfg, std::ostream& out, std::ostream&) {
    auto n = parse_integer(cfg.number);
    if (n == 0) throw usage_error("kfree: n must be nonzero");
    auto r = arith::kfree_part(n, cfg.k);
    emit(cfg, out, "t=" + r.t.get_str() + " z=" + r.z.get_str() + "\n");
    return kExitOk;
}

int cmd_classgroup(const config::RunConfig& cfg, std::ostream& out, std::ostream& log) {
    auto d = parse_integer(cfg.disc);
    const i128 di = nt::to_i128(d);
    if (!classgroup::is_fundamental(di)) throw usage_error("classgroup: " + cfg.disc + " is not a fundamental discriminant");
    cache::ClassGroupCache cc(cache_dir(cfg));
    if (cc.rejected()) log << "class-group cache: dropped " << cc.rejected() << " invalid entries\n";
    classgroup::AbelianGroupStructure g;
    if (di < 0) g = cc.memory().get_or_compute(di, classgroup::group_structure);
    else g = cc.memory().get_or_compute(di, [](i128 x) { return classgroup::narrow_group_structure(x); });
    cc.flush();
    emit(cfg, out, structure_json(d, g, di > 0).dump() + "\n");
    return kExitOk;
}

int cmd_gadget(const config::RunConfig& cfg, std::ostream& out, std::ostream&) {
    auto S = localize::parse_places(cfg.places);
    mpq_class eps;
    if (eps.set_str(cfg.epsilon, 10) != 0) throw usage_error("gadget: bad epsilon '" + cfg.epsilon + "'");
    eps.canonicalize();
    auto g = localize::build_gadget(S, eps);
    emit(cfg, out, g.to_json() + "\n");
    return kExitOk;
}

int cmd_fields(const config::RunConfig& cfg, std::ostream& out, std::ostream& log) {
    auto curve = specialize::load_curve(cfg.curve);
    auto opt = enumeration_options(cfg, curve);
    auto res = cfg.limit ? specialize::first_by_height(curve, opt, cfg.limit)
                         : specialize::enumerate_specializations(curve, opt);
    std::unique_ptr<cache::ClassGroupCache> cc;
    if (cfg.verify) cc = std::make_unique<cache::ClassGroupCache>(cache_dir(cfg));
    std::ostringstream body;
    int status = kExitOk;
    std::string failure;
    for (auto& r : res.records) {
        if (cfg.verify) {
            try {
                specialize::verify_record(r, cfg.m, &cc->memory());
            } catch (const capacity_error& e) {
                status = kExitCapacity;
                failure = e.what();
                break;
            }
        }
        body << r.to_json() << '\n';
    }
    if (cc) cc->flush();
    if (status != kExitOk) body << "{\"incomplete\":true,\"reason\":" << json(failure).dump() << "}\n";
    log << "fields: M=" << res.M << " N=" << res.N << " candidates=" << res.candidates
        << " fields=" << res.records.size() << " duplicates=" << res.duplicates << " squares=" << res.squares
        << (res.ramification_forced ? "" : " (S empty: no ramification forcing)") << '\n';
    emit(cfg, out, body.str());
    return status;
}

[[noreturn]] void crash() {
    std::cout.flush();
    std::cerr.flush();
    std::raise(SIGKILL);
    std::abort();
}

int cmd_census(const config::RunConfig& cfg, std::ostream& out, std::ostream& log) {
    std::vector<mpz_class> co;
    {
        std::stringstream ss(cfg.form);
        std::string item;
        while (std::getline(ss, item, ',')) co.push_back(parse_integer(item));
    }
    forms::BinaryForm F(co);
    census::Congruence cong{cfg.mod, cfg.a, cfg.b};
    auto xs = census::log_checkpoints(std::min(cfg.first_checkpoint, cfg.x), cfg.x);

    cache::CheckpointJournal journal(cache_dir(cfg), cfg.hash());
    if (!cfg.resume) journal.clear();
    std::size_t fresh = 0;
    census::CensusSeries series;
    bool halted = false;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        auto it = journal.completed().find(i);
        if (it != journal.completed().end() && it->second.value("x", 0ull) == xs[i]) {
            series.checkpoints.push_back({xs[i], it->second["count"].get<std::uint64_t>()});
            continue;
        }
        if (cfg.halt_after && fresh == cfg.halt_after) {
            halted = true;
            break;
        }
        auto count = census::s_k_count(F, xs[i], cfg.k, cong, cfg.workers);
        journal.record(i, {{"x", xs[i]}, {"count", count}});
        series.checkpoints.push_back({xs[i], count});
        ++fresh;
        if (cfg.kill_after && fresh == cfg.kill_after) crash();
    }
    const double exponent = 2.0 / F.degree();
    std::string csv = census::to_csv(series, exponent, 2);
    if (halted) csv += "# incomplete\n";
    log << "census: " << series.checkpoints.size() << "/" << xs.size() << " checkpoints, " << fresh << " computed\n";
    emit(cfg, out, csv);
    return halted ? kExitIncomplete : kExitOk;
}

json step_to_json(const census::FieldCensusRun::Step& st) {
    json recs = json::array();
    for (const auto& r : st.records) recs.push_back(r.to_json());
    return {{"x", st.x}, {"hits", st.hits}, {"refuted", st.refuted}, {"judged", st.judged},
            {"unverifiable", st.unverifiable}, {"records", recs}};
}

census::FieldCensusRun::Step step_from_json(const json& j) {
    census::FieldCensusRun::Step st;
    st.x = j.at("x").get<std::uint64_t>();
    st.hits = j.at("hits").get<std::uint64_t>();
    st.refuted = j.at("refuted").get<std::size_t>();
    st.judged = j.at("judged").get<std::size_t>();
    st.unverifiable = j.at("unverifiable").get<std::size_t>();
    return st;
}

int cmd_verify(const config::RunConfig& cfg, std::ostream& out, std::ostream& log) {
    auto curve = specialize::load_curve(cfg.curve);
    census::FieldCensusOptions opt;
    opt.enumeration = enumeration_options(cfg, curve);
    if (opt.enumeration.height_bound == 0) {
        // Default: s with s^(deg f + 1) about X.
        opt.enumeration.height_bound = static_cast<unsigned long>(
            std::ceil(std::pow(static_cast<double>(cfg.disc_bound), 1.0 / (curve.f.degree() + 1))));
    }
    opt.disc_bound = cfg.disc_bound;
    opt.m = cfg.m;
    opt.rank_target = cfg.rank;
    opt.checkpoints = census::log_checkpoints(std::min(cfg.first_checkpoint, cfg.disc_bound), cfg.disc_bound);

    cache::ClassGroupCache cc(cache_dir(cfg));
    cache::CheckpointJournal journal(cache_dir(cfg), cfg.hash());
    if (!cfg.resume) journal.clear();
    census::FieldCensusRun runner(curve, opt, &cc.memory());

    std::vector<census::FieldCensusRun::Step> steps;
    std::vector<std::string> record_lines;
    std::size_t fresh = 0;
    int status = kExitOk;
    std::string failure;
    for (std::size_t i = 0; i < runner.checkpoints().size(); ++i) {
        auto it = journal.completed().find(i);
        if (it != journal.completed().end() && it->second.value("x", 0ull) == runner.checkpoints()[i]) {
            steps.push_back(step_from_json(it->second));
            for (const auto& line : it->second["records"]) record_lines.push_back(line.get<std::string>());
            continue;
        }
        if (cfg.halt_after && fresh == cfg.halt_after) {
            status = kExitIncomplete;
            failure = "halted";
            break;
        }
        census::FieldCensusRun::Step st;
        try {
            st = runner.run_checkpoint(i);
        } catch (const capacity_error& e) {
            status = kExitCapacity;
            failure = e.what();
            break;
        }
        cc.flush();
        journal.record(i, step_to_json(st));
        for (const auto& r : st.records) record_lines.push_back(r.to_json());
        steps.push_back(std::move(st));
        ++fresh;
        if (cfg.kill_after && fresh == cfg.kill_after) crash();
    }
    auto series = census::FieldCensusRun::assemble(steps);
    const double exponent = 1.0 / (curve.genus + 1);
    std::string csv = census::to_csv(series, exponent, 2);
    if (status != kExitOk) csv += "# incomplete: " + failure + "\n";

    std::string jsonl;
    for (const auto& line : record_lines) jsonl += line + "\n";
    const auto& en = runner.enumeration();
    log << "verify: M=" << en.M << " N=" << en.N << " height_bound=" << opt.enumeration.height_bound
        << " fields=" << en.records.size() << " duplicates=" << en.duplicates
        << " refuted_fraction=" << series.refuted_fraction << '\n';

    std::string records_path = cfg.records;
    if (records_path.empty() && !cfg.output.empty()) records_path = cfg.output + ".records.jsonl";
    if (records_path.empty()) {
        emit(cfg, out, csv + jsonl);
    } else {
        emit(cfg, out, csv);
        config::RunConfig rc = cfg;
        rc.output = records_path;
        emit(rc, out, jsonl);
    }
    return status;
}

}  // namespace

int run(const config::RunConfig& cfg, std::ostream& out, std::ostream& log) {
    log << "config " << cfg.normalized().dump() << " hash=" << cfg.hash() << '\n';
    const auto& s = cfg.subcommand;
    if (s == "factor") return cmd_factor(cfg, out, log);
    if (s == "kfree") return cmd_kfree(cfg, out, log);
    if (s == "classgroup") return cmd_classgroup(cfg, out, log);
    if (s == "gadget") return cmd_gadget(cfg, out, log);
    if (s == "fields") return cmd_fields(cfg, out, log);
    if (s == "census") return cmd_census(cfg, out, log);
    if (s == "verify") return cmd_verify(cfg, out, log);
    throw usage_error("unknown subcommand '" + s + "'");
}

int main_entry(int argc, const char* const* argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        std::string help;
        auto cfg = config::parse_config(args, &help);
        if (cfg.subcommand == "help") {
            std::cout << help;
            return kExitOk;
        }
        return run(cfg, std::cout, std::cerr);
    } catch (const usage_error& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const precondition_error& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kExitUsage;
    } catch (const domain_error& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kExitUsage;
    } catch (const capacity_error& e) {
        std::cerr << "capacity: " << e.what() << '\n';
        return kExitCapacity;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace quadrank
