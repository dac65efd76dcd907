#include "quadrank/census.hpp"

#include "quadrank/arith.hpp"
#include "quadrank/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

namespace quadrank::census {

std::set<mpz_class> s_k_cores(const forms::BinaryForm& F, std::uint64_t x, unsigned k,
                              const Congruence& cong, unsigned workers) {
    require(k >= 2, "s_k_count: k must be at least 2");
    require(x >= 1, "s_k_count: x must be positive");
    require(cong.M >= 1, "s_k_count: modulus must be positive");
    require(F.degree() >= 1, "s_k_count: form must have positive degree");
    require(!F.is_power_of_linear(), "s_k_count: form is a constant multiple of a power of a linear form");
    require(F.is_squarefree(), "s_k_count: form must be squarefree");

    mpz_class side;
    mpz_root(side.get_mpz_t(), mpz_class(static_cast<unsigned long>(x)).get_mpz_t(),
             static_cast<unsigned long>(F.degree()));
    const std::uint64_t n = side.get_ui();
    const mpz_class bound(static_cast<unsigned long>(x));
    workers = std::max(1u, workers);

    // Shards over a (mod workers); partial core sets are merged by union.
    std::vector<std::set<mpz_class>> parts(workers);
    std::vector<std::exception_ptr> errors(workers);
    auto work = [&](unsigned w) {
        try {
            for (std::uint64_t a = 1 + w; a <= n; a += workers) {
                if (cong.M > 1 && a % cong.M != cong.A % cong.M) continue;
                for (std::uint64_t b = 1; b <= n; ++b) {
                    if (cong.M > 1 && b % cong.M != cong.B % cong.M) continue;
                    mpz_class v = F.evaluate(mpz_class(static_cast<unsigned long>(a)),
                                             mpz_class(static_cast<unsigned long>(b)));
                    if (v == 0) continue;
                    auto t = arith::kfree_part(v, k).t;
                    if (abs(t) <= bound) parts[w].insert(t);
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
    std::set<mpz_class> out;
    for (auto& p : parts) out.merge(p);
    return out;
}

std::uint64_t s_k_count(const forms::BinaryForm& F, std::uint64_t x, unsigned k, const Congruence& cong,
                        unsigned workers) {
    return s_k_cores(F, x, k, cong, workers).size();
}

std::vector<std::uint64_t> log_checkpoints(std::uint64_t first, std::uint64_t last) {
    require(first >= 1 && first <= last, "log_checkpoints: need 1 <= first <= last");
    std::vector<std::uint64_t> out;
    for (std::uint64_t x = first; x < last; x *= 10) {
        out.push_back(x);
        if (x > last / 10) break;
    }
    if (out.empty() || out.back() != last) out.push_back(last);
    return out;
}

FieldCensusRun::FieldCensusRun(const specialize::CurveSpec& c, FieldCensusOptions opt,
                               classgroup::StructureCache* cache)
    : opt_(std::move(opt)), cache_(cache) {
    require(opt_.disc_bound >= 1, "field_census: discriminant bound must be positive");
    checkpoints_ = opt_.checkpoints.empty() ? log_checkpoints(std::min<std::uint64_t>(10, opt_.disc_bound), opt_.disc_bound)
                                            : opt_.checkpoints;
    require(std::is_sorted(checkpoints_.begin(), checkpoints_.end()), "field_census: checkpoints must increase");
    enumeration_ = specialize::enumerate_specializations(c, opt_.enumeration);
    const mpz_class X(static_cast<unsigned long>(checkpoints_.back()));
    for (const auto& r : enumeration_.records)
        if (abs(r.d_field) <= X) in_range_.push_back(r);
    std::stable_sort(in_range_.begin(), in_range_.end(), [](const auto& a, const auto& b) {
        return abs(a.d_field) < abs(b.d_field);
    });
}

FieldCensusRun::Step FieldCensusRun::run_checkpoint(std::size_t i) {
    require(i < checkpoints_.size(), "field_census: checkpoint index out of range");
    Step step;
    step.x = checkpoints_[i];
    const mpz_class lo(static_cast<unsigned long>(i ? checkpoints_[i - 1] : 0));
    const mpz_class hi(static_cast<unsigned long>(step.x));
    for (auto r : in_range_) {
        const mpz_class ad = abs(r.d_field);
        if (ad <= lo || ad > hi) continue;
        specialize::verify_record(r, opt_.m, cache_);
        if (r.status == specialize::Status::refuted) ++step.refuted;
        if (r.status == specialize::Status::unverifiable) ++step.unverifiable;
        else ++step.judged;
        if (r.verified_rank && *r.verified_rank >= opt_.rank_target) ++step.hits;
        step.records.push_back(std::move(r));
    }
    return step;
}

CensusSeries FieldCensusRun::assemble(const std::vector<Step>& steps) {
    CensusSeries s;
    std::uint64_t count = 0;
    std::size_t refuted = 0, judged = 0;
    for (const auto& st : steps) {
        count += st.hits;
        refuted += st.refuted;
        judged += st.judged;
        s.checkpoints.push_back({st.x, count});
    }
    s.refuted_fraction = judged ? static_cast<double>(refuted) / static_cast<double>(judged) : 0.0;
    return s;
}

FieldCensus field_census(const specialize::CurveSpec& c, const FieldCensusOptions& opt,
                         classgroup::StructureCache* cache) {
    FieldCensusRun run(c, opt, cache);
    std::vector<FieldCensusRun::Step> steps;
    FieldCensus out;
    for (std::size_t i = 0; i < run.checkpoints().size(); ++i) {
        steps.push_back(run.run_checkpoint(i));
        for (const auto& r : steps.back().records) {
            if (r.status == specialize::Status::refuted) ++out.refuted;
            if (r.status == specialize::Status::unverifiable) ++out.unverifiable;
            out.records.push_back(r);
        }
    }
    out.series = FieldCensusRun::assemble(steps);
    return out;
}

GrowthFit growth_fit(const CensusSeries& s, double exponent, int log_power) {
    GrowthFit fit;
    std::vector<std::pair<double, double>> pts;
    for (const auto& p : s.checkpoints)
        if (p.count > 0) pts.emplace_back(std::log(static_cast<double>(p.x)), std::log(static_cast<double>(p.count)));
    if (pts.size() < 4) {
        fit.message = "need at least 4 checkpoints with positive counts, have " + std::to_string(pts.size());
        return fit;
    }
    double mx = 0, my = 0;
    for (auto [x, y] : pts) {
        mx += x;
        my += y;
    }
    mx /= pts.size();
    my /= pts.size();
    double sxy = 0, sxx = 0;
    for (auto [x, y] : pts) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    if (sxx == 0) {
        fit.message = "checkpoints do not vary";
        return fit;
    }
    fit.slope = sxy / sxx;
    double c = INFINITY;
    for (const auto& p : s.checkpoints) {
        if (p.x < 2) continue;
        double lx = std::log(static_cast<double>(p.x));
        double model = std::pow(static_cast<double>(p.x), exponent) / std::pow(lx, log_power);
        c = std::min(c, static_cast<double>(p.count) / model);
    }
    fit.constant = std::isfinite(c) ? c : 0.0;
    fit.ok = true;
    return fit;
}

std::string to_csv(const CensusSeries& s, double exponent, int log_power) {
    std::ostringstream os;
    os << "checkpoint,count,fitted_slope,fitted_constant,refuted_fraction\n";
    char buf[64];
    for (std::size_t i = 0; i < s.checkpoints.size(); ++i) {
        CensusSeries prefix{{s.checkpoints.begin(), s.checkpoints.begin() + static_cast<long>(i) + 1}, 0};
        auto fit = growth_fit(prefix, exponent, log_power);
        os << s.checkpoints[i].x << ',' << s.checkpoints[i].count << ',';
        if (fit.ok) {
            std::snprintf(buf, sizeof buf, "%.6f,%.6g", fit.slope, fit.constant);
            os << buf;
        } else {
            os << ',';
        }
        std::snprintf(buf, sizeof buf, ",%.6f", s.refuted_fraction);
        os << buf << '\n';
    }
    return os.str();
}

}  // namespace quadrank::census
