#include "quadrank/config.hpp"

#include "quadrank/errors.hpp"

#include <CLI11.hpp>

#include <gmpxx.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>

namespace quadrank::config {

namespace {

std::string trim(std::string s) {
    auto sp = [](unsigned char c) { return std::isspace(c) != 0; };
    while (!s.empty() && sp(s.back())) s.pop_back();
    std::size_t i = 0;
    while (i < s.size() && sp(s[i])) ++i;
    return s.substr(i);
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw usage_error("cannot read config file " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw usage_error(path + ":" + std::to_string(lineno) + ": expected key = value");
        auto key = trim(line.substr(0, eq));
        if (key.rfind("--", 0) == 0) key.erase(0, 2);
        kv[key] = trim(line.substr(eq + 1));
    }
    return kv;
}

// Numeric options are taken as text so that 1e12 style bounds work.
struct Raw {
    std::string height_bound, disc_bound, x, mod = "1", a = "0", b = "0", first_checkpoint = "10";
};

void build(CLI::App& app, RunConfig& c, Raw& raw) {
    app.require_subcommand(1, 1);
    app.set_help_all_flag("--help-all", "Help for every subcommand");

    auto common = [&](CLI::App* s) {
        s->add_option("--workers", c.workers, "Worker threads")->check(CLI::Range(1u, 1024u));
        s->add_option("--cache-dir", c.cache_dir, "Cache directory (default $QUADRANK_CACHE_DIR or .quadrank-cache)");
        s->add_option("--output", c.output, "Output file (default stdout)");
        s->add_option("--config", c.config_file, "key = value config file");
    };

    auto* factor = app.add_subcommand("factor", "Factor an integer");
    factor->add_option("n", c.number, "Nonzero integer")->required();
    common(factor);

    auto* kfree = app.add_subcommand("kfree", "k-free part n = t z^k");
    kfree->add_option("n", c.number, "Nonzero integer")->required();
    kfree->add_option("--k", c.k, "Exponent k >= 2")->check(CLI::Range(2u, 64u));
    common(kfree);

    auto* cg = app.add_subcommand("classgroup", "Class group of a quadratic discriminant");
    cg->add_option("--disc", c.disc, "Fundamental discriminant")->required()->allow_extra_args(false);
    common(cg);

    auto* gadget = app.add_subcommand("gadget", "Mobius gadget for a set of places");
    gadget->add_option("--places", c.places, "Comma list of places: inf and primes, or none")->required();
    gadget->add_option("--epsilon", c.epsilon, "Rational 0 < epsilon < 1");
    common(gadget);

    auto curve_opts = [&](CLI::App* s) {
        s->add_option("--curve", c.curve, "lsw-genus4, family:m:c, or a curve file")->required();
        s->add_option("--sign", c.sign, "neg or pos")->check(CLI::IsMember({"neg", "pos"}));
        s->add_option("--height-bound", raw.height_bound, "Bound on the height s of r/s");
        s->add_option("--bad-primes", c.bad_primes, "auto, none, or a comma list of primes");
    };

    auto* fields = app.add_subcommand("fields", "Specialized quadratic fields as JSONL");
    curve_opts(fields);
    fields->add_flag("--verify", c.verify, "Compute the class-group m-rank of each field");
    fields->add_option("--m", c.m, "Modulus m for --verify");
    fields->add_option("--limit", c.limit, "First N fields by height");
    common(fields);

    auto* census = app.add_subcommand("census", "Count k-free values of a binary form");
    census->add_option("--form", c.form, "Coefficients of X^i Y^(r-i), i = 0..r")->required();
    census->add_option("--degree", c.degree, "Degree r of the form")->required();
    census->add_option("--k", c.k, "k >= 2")->check(CLI::Range(2u, 64u));
    census->add_option("--x", raw.x, "Bound on |t|")->required();
    census->add_option("--mod", raw.mod, "Congruence modulus M");
    census->add_option("--a", raw.a, "a = A (mod M)");
    census->add_option("--b", raw.b, "b = B (mod M)");
    census->add_option("--first-checkpoint", raw.first_checkpoint, "Smallest checkpoint (x10 spacing)");
    common(census);

    auto* verify = app.add_subcommand("verify", "Field census with verified class-group ranks");
    curve_opts(verify);
    verify->add_option("--m", c.m, "Modulus m")->required();
    verify->add_option("--rank", c.rank, "Rank target r")->required();
    verify->add_option("--disc-bound", raw.disc_bound, "Bound X on |d|")->required();
    verify->add_option("--records", c.records, "Per-field JSONL output");
    verify->add_option("--first-checkpoint", raw.first_checkpoint, "Smallest checkpoint (x10 spacing)");
    common(verify);

    for (auto* s : {census, verify}) {
        s->add_flag("--resume,!--no-resume", c.resume, "Reuse journaled checkpoints (default on)");
        s->add_option("--halt-after", c.halt_after, "Stop after this many new checkpoints (partial output, exit 4)");
        s->add_option("--kill-after", c.kill_after, "Crash (SIGKILL) after this many new checkpoints");
    }
}

void parse_into(const std::vector<std::string>& args, RunConfig& c, Raw& raw, std::string* help) {
    CLI::App app{"quadrank: quadratic fields from hyperelliptic specializations", "quadrank"};
    build(app, c, raw);
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        if (!help) throw usage_error("help requested");
        *help = app.help();
        for (auto* s : app.get_subcommands())
            if (s->parsed()) *help = s->help();
        c.subcommand = "help";
        return;
    } catch (const CLI::CallForAllHelp&) {
        if (!help) throw usage_error("help requested");
        *help = app.help("", CLI::AppFormatMode::All);
        c.subcommand = "help";
        return;
    } catch (const CLI::ParseError& e) {
        throw usage_error(e.what());
    }
    for (auto* s : app.get_subcommands()) c.subcommand = s->get_name();
}

std::vector<std::string> option_names(const std::string& subcommand) {
    RunConfig c;
    Raw raw;
    CLI::App app;
    build(app, c, raw);
    std::vector<std::string> out;
    for (const auto* opt : app.get_subcommand(subcommand)->get_options())
        for (const auto& n : opt->get_lnames()) out.push_back(n);
    return out;
}

}  // namespace

std::uint64_t parse_count(const std::string& text) {
    std::string t = trim(text);
    if (t.empty()) throw usage_error("expected a positive integer, got an empty value");
    auto e = t.find_first_of("eE");
    mpq_class mant;
    long exp10 = 0;
    std::string m = e == std::string::npos ? t : t.substr(0, e);
    if (e != std::string::npos) {
        try {
            std::size_t pos = 0;
            exp10 = std::stol(t.substr(e + 1), &pos);
            if (pos != t.size() - e - 1) throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw usage_error("malformed number '" + text + "'");
        }
    }
    auto dot = m.find('.');
    std::string digits = m;
    if (dot != std::string::npos) {
        digits = m.substr(0, dot) + m.substr(dot + 1);
        exp10 -= static_cast<long>(m.size() - dot - 1);
    }
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(), ::isdigit))
        throw usage_error("malformed number '" + text + "'");
    mpz_class v(digits, 10);
    mpz_class p10;
    mpz_ui_pow_ui(p10.get_mpz_t(), 10, static_cast<unsigned long>(exp10 < 0 ? -exp10 : exp10));
    mpq_class q = exp10 >= 0 ? mpq_class(v * p10) : mpq_class(v, p10);
    q.canonicalize();
    if (q.get_den() != 1) throw usage_error("not an integer: '" + text + "'");
    if (!q.get_num().fits_ulong_p()) throw usage_error("number out of range: '" + text + "'");
    return q.get_num().get_ui();
}

RunConfig parse_config(const std::vector<std::string>& args, std::string* help) {
    // The config file is merged before parsing so that required options may
    // come from it; command-line tokens win.
    std::string config_path, subcommand;
    std::vector<std::string> given;
    for (std::size_t i = 0; i < args.size(); ++i) {
        const auto& a = args[i];
        if (subcommand.empty() && a.rfind("-", 0) != 0) subcommand = a;
        if (a.rfind("--", 0) != 0) continue;
        auto eq = a.find('=');
        std::string name = a.substr(2, eq == std::string::npos ? std::string::npos : eq - 2);
        if (name.rfind("no-", 0) == 0) name.erase(0, 3);
        given.push_back(name);
        if (name == "config") {
            if (eq != std::string::npos) config_path = a.substr(eq + 1);
            else if (i + 1 < args.size()) config_path = args[i + 1];
        }
    }
    std::vector<std::string> merged = args;
    if (!config_path.empty()) {
        auto kv = read_config_file(config_path);
        std::vector<std::string> names;
        try {
            names = option_names(subcommand);
        } catch (const std::exception&) {
            throw usage_error("config file needs a valid subcommand on the command line");
        }
        RunConfig probe;
        Raw probe_raw;
        CLI::App app;
        build(app, probe, probe_raw);
        auto* sub = app.get_subcommand(subcommand);
        for (const auto& [key, value] : kv) {
            if (key == "config") throw usage_error("config file: nested config not supported");
            if (std::find(names.begin(), names.end(), key) == names.end())
                throw usage_error("config file: unknown key '" + key + "' for " + subcommand);
            if (std::find(given.begin(), given.end(), key) != given.end()) continue;
            auto* opt = sub->get_option("--" + key);
            if (opt->get_expected_min() == 0) {
                if (value == "true" || value == "1" || value == "yes") merged.push_back("--" + key);
                else if (value != "false" && value != "0" && value != "no")
                    throw usage_error("config file: flag '" + key + "' needs true or false");
            } else {
                merged.push_back("--" + key);
                merged.push_back(value);
            }
        }
    }
    RunConfig c;
    Raw raw;
    parse_into(merged, c, raw, help);
    if (c.subcommand == "help") return c;

    auto count_or = [](const std::string& s, std::uint64_t fallback) { return s.empty() ? fallback : parse_count(s); };
    c.height_bound = count_or(raw.height_bound, 0);
    c.disc_bound = count_or(raw.disc_bound, 0);
    c.x = count_or(raw.x, 0);
    c.mod = count_or(raw.mod, 1);
    c.a = count_or(raw.a, 0);
    c.b = count_or(raw.b, 0);
    c.first_checkpoint = count_or(raw.first_checkpoint, 10);

    const auto& s = c.subcommand;
    if (s == "fields") {
        if (c.height_bound == 0 && c.limit == 0) throw usage_error("fields: give --height-bound or --limit");
        if (c.verify && c.m < 2) throw usage_error("fields: --verify needs --m >= 2");
        if (!c.verify && c.m != 0) throw usage_error("fields: --m only applies with --verify");
    }
    if (s == "census") {
        std::size_t n = static_cast<std::size_t>(std::count(c.form.begin(), c.form.end(), ',')) + 1;
        if (c.degree < 1) throw usage_error("census: --degree must be positive");
        if (n != static_cast<std::size_t>(c.degree) + 1)
            throw usage_error("census: --form has " + std::to_string(n) + " coefficients but --degree " +
                              std::to_string(c.degree) + " needs " + std::to_string(c.degree + 1));
        if (c.x < 1) throw usage_error("census: --x must be positive");
        if (c.mod < 1) throw usage_error("census: --mod must be positive");
    }
    if (s == "verify") {
        if (c.m < 2) throw usage_error("verify: --m must be at least 2");
        if (c.rank < 0) throw usage_error("verify: --rank must be nonnegative");
        if (c.disc_bound < 1) throw usage_error("verify: --disc-bound must be positive");
    }
    if ((s == "census" || s == "verify") && c.first_checkpoint < 1)
        throw usage_error("--first-checkpoint must be positive");
    if (c.halt_after && c.kill_after) throw usage_error("--halt-after and --kill-after are exclusive");
    return c;
}

nlohmann::ordered_json RunConfig::normalized() const {
    nlohmann::ordered_json j;
    j["subcommand"] = subcommand;
    if (subcommand == "factor" || subcommand == "kfree") {
        j["n"] = number;
        if (subcommand == "kfree") j["k"] = k;
    } else if (subcommand == "classgroup") {
        j["disc"] = disc;
    } else if (subcommand == "gadget") {
        j["places"] = places;
        j["epsilon"] = epsilon;
    } else if (subcommand == "fields" || subcommand == "verify") {
        j["curve"] = curve;
        j["sign"] = sign;
        j["height_bound"] = height_bound;
        j["bad_primes"] = bad_primes;
        if (subcommand == "fields") {
            j["verify"] = verify;
            j["m"] = m;
            j["limit"] = limit;
        } else {
            j["m"] = m;
            j["rank"] = rank;
            j["disc_bound"] = disc_bound;
            j["first_checkpoint"] = first_checkpoint;
        }
    } else if (subcommand == "census") {
        j["form"] = form;
        j["degree"] = degree;
        j["k"] = k;
        j["x"] = x;
        j["mod"] = mod;
        j["a"] = a;
        j["b"] = b;
        j["first_checkpoint"] = first_checkpoint;
    }
    return j;
}

std::string RunConfig::hash() const {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : normalized().dump()) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace quadrank::config
