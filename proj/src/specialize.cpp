#include "quadrank/specialize.hpp"

#include "quadrank/arith.hpp"
#include "quadrank/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

namespace quadrank::specialize {

namespace {

nlohmann::ordered_json big(const mpz_class& v) {
    if (v.fits_slong_p()) return v.get_si();
    return v.get_str();
}

std::string trim(std::string s) {
    auto not_space = [](unsigned char ch) { return !std::isspace(ch); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

mpq_class parse_rational(const std::string& text) {
    mpq_class q;
    if (q.set_str(trim(text), 10) != 0) throw usage_error("not a rational number: " + text);
    q.canonicalize();
    return q;
}

mpz_class height_of(const mpq_class& x) {
    mpz_class a = abs(x.get_num());
    return std::max(a, mpz_class(x.get_den()));
}

}  // namespace

Sign parse_sign(const std::string& text) {
    if (text == "neg" || text == "-" || text == "negative") return Sign::negative;
    if (text == "pos" || text == "+" || text == "positive") return Sign::positive;
    throw usage_error("sign must be neg or pos, got '" + text + "'");
}

std::string to_string(Sign s) { return s == Sign::negative ? "neg" : "pos"; }

std::string to_string(Status s) {
    switch (s) {
        case Status::pending: return "pending";
        case Status::verified: return "verified";
        case Status::refuted: return "refuted";
        case Status::unverifiable: return "unverifiable";
    }
    return "pending";
}

void validate(const CurveSpec& c) {
    const auto& f = c.f;
    require(f.degree() >= 1 && f.degree() % 2 == 1, "curve: degree must be odd");
    require(f.leading() == 1, "curve: polynomial must be monic");
    require(f.has_integer_coefficients(), "curve: coefficients must be integers");
    require(forms::is_squarefree(f), "curve: polynomial must be squarefree");
    require(f.degree() == 2 * c.genus + 1, "curve: degree must equal 2g + 1");
}

CurveSpec catalog_curve(const std::string& name, int m, const mpq_class& c) {
    CurveSpec out;
    if (name == "lsw-genus4") {
        std::vector<mpq_class> co(10, 0);
        co[0] = 11764900;
        co[3] = -369249;
        co[6] = 2973;
        co[9] = 1;
        out.f = Polynomial(co);
        out.genus = 4;
        out.m = 3;
        out.claimed_torsion_rank = 3;
        out.provenance = "lsw-genus4";
    } else if (name == "family") {
        require(m > 1, "family: m must exceed 1");
        require(c != 0 && c != 1 && c != -1, "family: c must not be 0 or +-1");
        std::vector<mpq_class> co(static_cast<std::size_t>(2 * m) + 1, 0);
        co[0] = c * c;
        co[static_cast<std::size_t>(m)] = -(1 + c * c);
        co[static_cast<std::size_t>(2 * m)] = 1;
        Polynomial pre(co);
        auto model = forms::odd_model(pre, 1);
        out.f = model.h;
        out.genus = model.genus;
        out.m = static_cast<unsigned>(m);
        out.claimed_torsion_rank = 2;
        out.pre_model = pre;
        out.provenance = "family m=" + std::to_string(m) + " c=" + c.get_str();
    } else {
        throw precondition_error("unknown catalog curve '" + name + "'");
    }
    validate(out);
    return out;
}

CurveSpec load_curve(const std::string& name_or_path) {
    if (name_or_path == "lsw-genus4") return catalog_curve(name_or_path);
    if (name_or_path.rfind("family:", 0) == 0) {
        auto rest = name_or_path.substr(7);
        auto colon = rest.find(':');
        if (colon == std::string::npos) throw usage_error("family curve needs family:m:c");
        int m;
        try {
            m = std::stoi(rest.substr(0, colon));
        } catch (const std::exception&) {
            throw usage_error("family: m is not an integer");
        }
        return catalog_curve("family", m, parse_rational(rest.substr(colon + 1)));
    }
    std::ifstream in(name_or_path);
    if (!in) throw usage_error("unknown curve '" + name_or_path + "' (not a catalog name or readable file)");
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw usage_error("curve file: expected key = value: " + line);
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    if (!kv.count("coefficients")) throw usage_error("curve file: missing coefficients");
    Polynomial f = forms::parse_polynomial(kv["coefficients"]);
    CurveSpec out;
    out.provenance = kv.count("label") ? kv["label"] : name_or_path;
    try {
        out.m = kv.count("m") ? static_cast<unsigned>(std::stoul(kv["m"])) : 2;
        out.claimed_torsion_rank = kv.count("claimed_rank") ? std::stoi(kv["claimed_rank"]) : 0;
    } catch (const std::exception&) {
        throw usage_error("curve file: m and claimed_rank must be integers");
    }
    if (f.degree() % 2 == 0) {
        if (!kv.count("root")) throw usage_error("curve file: even degree needs a rational root");
        auto model = forms::odd_model(f, parse_rational(kv["root"]));
        out.pre_model = f;
        out.f = model.h;
        out.genus = model.genus;
    } else {
        out.f = f;
        out.genus = (f.degree() - 1) / 2;
    }
    validate(out);
    return out;
}

std::set<unsigned long> discriminant_primes(const Polynomial& f) {
    mpq_class disc = forms::discriminant(f);
    require(disc != 0, "discriminant_primes: polynomial is not squarefree");
    std::set<unsigned long> out;
    for (const mpz_class& part : {mpz_class(disc.get_num()), mpz_class(disc.get_den())}) {
        if (part == 1 || part == -1) continue;
        for (const auto& pp : arith::factor(part).factors) {
            if (!pp.prime.fits_ulong_p()) throw capacity_error("discriminant prime exceeds 64 bits");
            out.insert(pp.prime.get_ui());
        }
    }
    return out;
}

mpz_class choose_shift(const Polynomial& f, const mpz_class& M, Sign sign) {
    require(f.degree() >= 1 && f.degree() % 2 == 1, "choose_shift: degree must be odd");
    require(f.leading() == 1, "choose_shift: polynomial must be monic");
    require(forms::is_squarefree(f), "choose_shift: polynomial must be squarefree");
    require(M >= 1, "choose_shift: M must be positive");
    // The window must clear every real root on its side, not just sit in a
    // bounded interval where f happens to have the right sign.
    mpq_class root_bound = 1;
    for (const auto& q : f.coefficients()) root_bound += abs(q);
    const forms::SturmSequence sturm(f);
    for (mpz_class N = 1;; ++N) {
        if (gcd(N, M) != 1) continue;
        mpq_class centre(N, M);
        centre.canonicalize();
        if (sign == Sign::positive) {
            if (sturm.roots_in_open(centre - 1, root_bound) == 0 && f(centre - 1) >= 0) return N;
        } else {
            if (sturm.roots_in_open(-root_bound, -centre + 1) == 0 && f(-centre + 1) <= 0) return N;
        }
    }
}

mpz_class raw_value(const Polynomial& f, const mpq_class& x0) {
    const mpz_class& a = x0.get_num();
    const mpz_class& b = x0.get_den();
    const int d = f.degree();
    // b^(d+1) f(a/b) = b * sum f_i a^i b^(d-i)
    mpq_class acc = 0;
    for (int i = d; i >= 0; --i) {
        mpz_class bp;
        mpz_pow_ui(bp.get_mpz_t(), b.get_mpz_t(), static_cast<unsigned long>(d - i));
        mpz_class ap;
        mpz_pow_ui(ap.get_mpz_t(), a.get_mpz_t(), static_cast<unsigned long>(i));
        acc += f.coeff(static_cast<std::size_t>(i)) * mpq_class(ap * bp);
    }
    acc *= b;
    require(acc.get_den() == 1, "raw_value: polynomial must have integer coefficients");
    return acc.get_num();
}

SpecializationRecord specialize_at(const CurveSpec& c, const mpq_class& x0, int predicted_rank) {
    SpecializationRecord r;
    r.x0 = x0;
    r.x0.canonicalize();
    r.height = height_of(r.x0);
    r.raw_value = raw_value(c.f, r.x0);
    if (r.raw_value == 0) throw domain_error("specialize_at: x0 is a root of f");
    r.t = arith::kfree_part(r.raw_value, 2).t;
    if (r.t == 1) r.d_field = 1;
    else r.d_field = classgroup::quadratic_field(r.t).d;
    r.predicted_rank = predicted_rank;
    return r;
}

std::string SpecializationRecord::to_json() const {
    nlohmann::ordered_json j;
    j["x0"] = x0.get_str();
    j["height"] = big(height);
    j["raw_value"] = big(raw_value);
    j["t"] = big(t);
    j["d_field"] = big(d_field);
    j["predicted_rank"] = predicted_rank;
    if (verified_rank) j["verified_rank"] = *verified_rank;
    else j["verified_rank"] = nullptr;
    j["status"] = to_string(status);
    return j.dump();
}

EnumerationResult enumerate_specializations(const CurveSpec& c, const EnumerationOptions& opt) {
    validate(c);
    require(opt.height_bound >= 1, "enumerate_specializations: height bound must be positive");
    EnumerationResult out;
    out.ramification_forced = !opt.bad_primes.empty();
    for (auto p : opt.bad_primes) {
        require(arith::is_prime(mpz_class(p)), "enumerate_specializations: bad primes must be prime");
        out.M *= p;
    }
    const mpz_class& M = out.M;
    out.N = choose_shift(c.f, M, opt.sign);
    mpq_class centre(out.N, M);
    centre.canonicalize();
    if (opt.sign == Sign::negative) centre = -centre;

    out.height_constant = out.N + M;
    mpq_class coeff_sum = 0;
    for (const auto& q : c.f.coefficients()) coeff_sum += abs(q);
    mpz_class hc_pow;
    mpz_pow_ui(hc_pow.get_mpz_t(), out.height_constant.get_mpz_t(), static_cast<unsigned long>(c.f.degree() + 1));
    out.discriminant_constant = 4 * mpz_class(coeff_sum.get_num()) * hc_pow;

    const int predicted =
        opt.sign == Sign::negative ? c.claimed_torsion_rank : c.claimed_torsion_rank - 1;
    const unsigned workers = std::max(1u, opt.workers);
    const unsigned long B = opt.height_bound;

    struct Shard {
        std::vector<SpecializationRecord> records;
        std::size_t candidates = 0;
        std::size_t squares = 0;
    };
    std::vector<Shard> shards(workers);
    std::vector<std::exception_ptr> errors(workers);
    auto work = [&](unsigned w) {
        try {
            Shard& sh = shards[w];
            for (unsigned long s = 1 + w; s <= B; s += workers) {
                mpz_class sz(s);
                if (gcd(sz, M) != 1) continue;
                // |r| * M < s
                mpz_class rmax = (sz - 1) / M;
                for (mpz_class r = -rmax; r <= rmax; ++r) {
                    if (gcd(r, sz) != 1) continue;
                    mpq_class step(r * M, sz);
                    step.canonicalize();
                    mpq_class x0 = centre + step;
                    ++sh.candidates;
                    auto rec = specialize_at(c, x0, predicted);
                    if (rec.t == 1) {
                        ++sh.squares;
                        continue;
                    }
                    sh.records.push_back(std::move(rec));
                }
            }
        } catch (...) {
            errors[w] = std::current_exception();
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    std::vector<SpecializationRecord> all;
    for (auto& sh : shards) {
        out.candidates += sh.candidates;
        out.squares += sh.squares;
        for (auto& r : sh.records) all.push_back(std::move(r));
    }
    std::sort(all.begin(), all.end(), [](const SpecializationRecord& x, const SpecializationRecord& y) {
        if (x.height != y.height) return x.height < y.height;
        return x.x0 < y.x0;
    });
    std::set<mpz_class> seen;
    for (auto& r : all) {
        if (!seen.insert(r.t).second) {
            ++out.duplicates;
            continue;
        }
        out.records.push_back(std::move(r));
    }
    return out;
}

EnumerationResult first_by_height(const CurveSpec& c, EnumerationOptions opt, std::size_t count) {
    require(count >= 1, "first_by_height: count must be positive");
    opt.height_bound = std::max(1ul, opt.height_bound);
    while (true) {
        auto res = enumerate_specializations(c, opt);
        // H(x0) >= max(M s, |N s + r M^2|) > max(M, N - M) * s, so every x0
        // of height <= max(M, N - M) * B has s <= B and the prefix is complete.
        const mpz_class complete = std::max(res.M, mpz_class(res.N - res.M)) * opt.height_bound;
        std::size_t prefix = 0;
        while (prefix < res.records.size() && res.records[prefix].height <= complete) ++prefix;
        if (prefix >= count) {
            res.records.resize(count);
            return res;
        }
        if (opt.height_bound > (1ul << 40)) throw capacity_error("first_by_height: height bound exhausted");
        opt.height_bound *= 2;
    }
}

void verify_record(SpecializationRecord& r, unsigned m, classgroup::StructureCache* cache) {
    require(m > 1, "verify_record: m must exceed 1");
    if (r.d_field == 1) {
        r.status = Status::unverifiable;
        return;
    }
    classgroup::AbelianGroupStructure g;
    if (r.d_field < 0) {
        mpz_class bound = nt::to_mpz(classgroup::kImaginaryCapacity);
        if (-r.d_field > bound) throw capacity_error("verify: |d| = " + mpz_class(-r.d_field).get_str() + " above supported bound");
        const i128 d = nt::to_i128(r.d_field);
        g = cache ? cache->get_or_compute(d, classgroup::group_structure) : classgroup::group_structure(d);
    } else {
        if (m % 2 == 0 || r.d_field > nt::to_mpz(classgroup::kRealCapacity)) {
            r.status = Status::unverifiable;
            return;
        }
        const i128 d = nt::to_i128(r.d_field);
        auto narrow = [](i128 x) { return classgroup::narrow_group_structure(x); };
        g = cache ? cache->get_or_compute(d, narrow) : narrow(d);
    }
    r.verified_rank = classgroup::m_rank(g, m);
    r.status = *r.verified_rank >= r.predicted_rank ? Status::verified : Status::refuted;
}

}  // namespace quadrank::specialize
