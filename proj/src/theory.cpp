#include "laftr/theory.hpp"

#include "laftr/errors.hpp"
#include "laftr/nn.hpp"
#include "laftr/parallel.hpp"

#include <bit>
#include <cmath>
#include <sstream>

namespace laftr::theory {

namespace {

constexpr double kExact = 1e-12;

void check_table_sum(double total) {
    if (std::abs(total - 1.0) > kExact) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "scenario table sums to " << total << ", expected 1";
        throw InputError(msg.str());
    }
}

void check_entry(double v) {
    if (!std::isfinite(v) || v < 0.0) {
        throw InputError("scenario table entries must be finite and nonnegative");
    }
}

double expect(std::span<const double> p, std::span<const double> f) {
    double s = 0.0;
    for (std::size_t z = 0; z < p.size(); ++z) {
        s += p[z] * f[z];
    }
    return s;
}

std::vector<double> as_real(std::span<const int> bits) { return {bits.begin(), bits.end()}; }

void check_binary(std::span<const int> g, std::size_t k) {
    if (g.size() != k) {
        throw InputError("classifier length does not match the support");
    }
    for (int v : g) {
        if (v != 0 && v != 1) {
            throw InputError("classifier values must be 0 or 1");
        }
    }
}

void check_soft(std::span<const double> f, std::size_t k, const char* what) {
    if (f.size() != k) {
        throw InputError(std::string(what) + " length does not match the support");
    }
    for (double v : f) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw InputError(std::string(what) + " values must lie in [0, 1]");
        }
    }
}

// Maximizes sum_i bit_i * c_i over all 2^n bit vectors, visiting them in
// Gray-code order so each step flips one bit. Ties keep the first maximizer.
std::vector<int> enumerate_linear(std::span<const double> c) {
    const std::size_t n = c.size();
    std::vector<int> bits(n, 0);
    std::vector<int> best(n, 0);
    double current = 0.0;
    double best_value = 0.0;
    const std::uint64_t total = std::uint64_t{1} << n;
    for (std::uint64_t i = 1; i < total; ++i) {
        const auto j = static_cast<std::size_t>(std::countr_zero(i));
        bits[j] ^= 1;
        current += bits[j] ? c[j] : -c[j];
        if (current > best_value) {
            best_value = current;
            best = bits;
        }
    }
    return best;
}

std::vector<double> difference(const std::vector<double>& p1, const std::vector<double>& p0) {
    std::vector<double> c(p0.size());
    for (std::size_t z = 0; z < c.size(); ++z) {
        c[z] = p1[z] - p0[z];
    }
    return c;
}

void require_labeled(const DiscreteScenario& s) {
    if (!s.labeled()) {
        throw InputError("scenario has no labels");
    }
}

void cross_check(double value, double reference, const char* what) {
    if (std::abs(value - reference) > kExact) {
        std::ostringstream msg;
        msg.precision(17);
        msg << what << ": enumerated optimum " << value << " differs from statistical distance " << reference;
        throw InternalStateError(msg.str());
    }
}

}  // namespace

const std::vector<double>& DiscreteScenario::cell(int a, int y) const {
    require_labeled(*this);
    return cell_[a][y];
}

DiscreteScenario DiscreteScenario::from_joint(const JointZA& p) {
    if (p.empty()) {
        throw InputError("scenario support is empty");
    }
    DiscreteScenario s;
    double total = 0.0;
    for (const auto& row : p) {
        s.p_.push_back({{{row[0], 0.0}, {row[1], 0.0}}});
        for (double v : row) {
            check_entry(v);
            total += v;
        }
    }
    check_table_sum(total);
    s.derive();
    return s;
}

DiscreteScenario DiscreteScenario::from_labeled_joint(const JointZAY& p) {
    if (p.empty()) {
        throw InputError("scenario support is empty");
    }
    DiscreteScenario s;
    s.labeled_ = true;
    s.p_ = p;
    double total = 0.0;
    for (const auto& za : p) {
        for (const auto& zay : za) {
            for (double v : zay) {
                check_entry(v);
                total += v;
            }
        }
    }
    check_table_sum(total);
    s.derive();
    return s;
}

void DiscreteScenario::derive() {
    const std::size_t k = p_.size();
    for (int a = 0; a < 2; ++a) {
        double ga = 0.0;
        for (std::size_t z = 0; z < k; ++z) {
            ga += mass(z, a);
        }
        if (!(ga > 0.0)) {
            throw InputError("group A=" + std::to_string(a) + " has zero mass");
        }
        group_[a].resize(k);
        for (std::size_t z = 0; z < k; ++z) {
            group_[a][z] = mass(z, a) / ga;
        }
        if (!labeled_) {
            continue;
        }
        for (int y = 0; y < 2; ++y) {
            double m = 0.0;
            for (std::size_t z = 0; z < k; ++z) {
                m += p_[z][a][y];
            }
            if (!(m > 0.0)) {
                throw InputError("cell A=" + std::to_string(a) + ", Y=" + std::to_string(y) + " has zero mass");
            }
            cell_[a][y].resize(k);
            for (std::size_t z = 0; z < k; ++z) {
                cell_[a][y][z] = p_[z][a][y] / m;
            }
        }
    }
}

DiscreteScenario DiscreteScenario::random(std::size_t k, bool labeled, std::mt19937_64& rng) {
    if (k == 0) {
        throw InputError("scenario support is empty");
    }
    std::exponential_distribution<double> draw(1.0);
    const int labels = labeled ? 2 : 1;
    std::vector<std::array<std::array<double, 2>, 2>> w(k);
    double total = 0.0;
    for (auto& za : w) {
        for (auto& zay : za) {
            zay = {0.0, 0.0};
            for (int y = 0; y < labels; ++y) {
                zay[y] = draw(rng) + 0.01;
                total += zay[y];
            }
        }
    }
    for (auto& za : w) {
        for (auto& zay : za) {
            for (double& v : zay) {
                v /= total;
            }
        }
    }
    if (labeled) {
        return from_labeled_joint(w);
    }
    JointZA p(k);
    for (std::size_t z = 0; z < k; ++z) {
        p[z] = {w[z][0][0], w[z][1][0]};
    }
    return from_joint(p);
}

DiscreteScenario DiscreteScenario::permuted(std::span<const std::size_t> perm) const {
    if (perm.size() != p_.size()) {
        throw InputError("permutation length does not match the support");
    }
    std::vector<std::array<std::array<double, 2>, 2>> q(p_.size());
    std::vector<bool> seen(p_.size(), false);
    for (std::size_t z = 0; z < p_.size(); ++z) {
        if (perm[z] >= p_.size() || seen[perm[z]]) {
            throw InputError("not a permutation");
        }
        seen[perm[z]] = true;
        q[perm[z]] = p_[z];
    }
    DiscreteScenario s;
    s.labeled_ = labeled_;
    s.p_ = std::move(q);
    s.derive();
    return s;
}

double dp_objective(const DiscreteScenario& s, std::span<const double> h) {
    check_soft(h, s.support_size(), "adversary");
    double e0 = 0.0;
    for (std::size_t z = 0; z < h.size(); ++z) {
        e0 += s.group(0)[z] * (1.0 - h[z]);
    }
    return e0 + expect(s.group(1), h) - 1.0;
}

double eopp_objective(const DiscreteScenario& s, std::span<const double> h_y0) {
    require_labeled(s);
    check_soft(h_y0, s.support_size(), "adversary");
    double e0 = 0.0;
    for (std::size_t z = 0; z < h_y0.size(); ++z) {
        e0 += s.cell(0, 0)[z] * (1.0 - h_y0[z]);
    }
    return e0 + expect(s.cell(1, 0), h_y0) - 1.0;
}

double eo_objective(const DiscreteScenario& s, std::span<const double> h_y0, std::span<const double> h_y1) {
    require_labeled(s);
    check_soft(h_y0, s.support_size(), "adversary");
    check_soft(h_y1, s.support_size(), "adversary");
    double total = 0.0;
    for (int y = 0; y < 2; ++y) {
        const auto h = y == 0 ? h_y0 : h_y1;
        for (std::size_t z = 0; z < h.size(); ++z) {
            total += s.cell(0, y)[z] * (1.0 - h[z]) + s.cell(1, y)[z] * h[z];
        }
    }
    return total - 2.0;
}

double delta_dp(const DiscreteScenario& s, std::span<const double> g) {
    check_soft(g, s.support_size(), "classifier");
    return std::abs(expect(s.group(0), g) - expect(s.group(1), g));
}

double delta_eopp(const DiscreteScenario& s, std::span<const double> g) {
    require_labeled(s);
    check_soft(g, s.support_size(), "classifier");
    return std::abs(expect(s.cell(0, 0), g) - expect(s.cell(1, 0), g));
}

double delta_eo(const DiscreteScenario& s, std::span<const double> g) {
    require_labeled(s);
    check_soft(g, s.support_size(), "classifier");
    std::vector<double> not_g(g.size());
    for (std::size_t z = 0; z < g.size(); ++z) {
        not_g[z] = 1.0 - g[z];
    }
    return std::abs(expect(s.cell(0, 0), g) - expect(s.cell(1, 0), g)) +
           std::abs(expect(s.cell(0, 1), not_g) - expect(s.cell(1, 1), not_g));
}

AdversaryOptimum optimal_adversary_dp(const DiscreteScenario& s) {
    if (s.support_size() > kMaxDpSupport) {
        throw InputError("support too large for enumeration (max " + std::to_string(kMaxDpSupport) + ")");
    }
    AdversaryOptimum best;
    best.h = enumerate_linear(difference(s.group(1), s.group(0)));
    best.value = dp_objective(s, as_real(best.h));
    cross_check(best.value, metrics::statistical_distance(s.groups()).value, "dp");
    return best;
}

AdversaryOptimum optimal_adversary_eopp(const DiscreteScenario& s) {
    require_labeled(s);
    if (s.support_size() > kMaxDpSupport) {
        throw InputError("support too large for enumeration (max " + std::to_string(kMaxDpSupport) + ")");
    }
    AdversaryOptimum best;
    best.h = enumerate_linear(difference(s.cell(1, 0), s.cell(0, 0)));
    best.value = eopp_objective(s, as_real(best.h));
    cross_check(best.value, metrics::statistical_distance(s.cells(0)).value, "eopp");
    return best;
}

AdversaryOptimum optimal_adversary_eo(const DiscreteScenario& s) {
    require_labeled(s);
    const std::size_t k = s.support_size();
    if (k > kMaxEoSupport) {
        throw InputError("support too large for enumeration (max " + std::to_string(kMaxEoSupport) + ")");
    }
    // One joint enumeration over (h(., y=0), h(., y=1)).
    auto c = difference(s.cell(1, 0), s.cell(0, 0));
    const auto c1 = difference(s.cell(1, 1), s.cell(0, 1));
    c.insert(c.end(), c1.begin(), c1.end());
    AdversaryOptimum best;
    best.h = enumerate_linear(c);
    const auto h = as_real(best.h);
    best.value = eo_objective(s, std::span(h).first(k), std::span(h).subspan(k));
    cross_check(best.value,
                metrics::statistical_distance(s.cells(0)).value + metrics::statistical_distance(s.cells(1)).value,
                "eo");
    return best;
}

nlohmann::json BoundRecord::to_json() const {
    return {{"kind", kind},
            {"delta", delta},
            {"optimal_value", optimal_value},
            {"constructed_value", constructed_value},
            {"constructed_h", constructed_h},
            {"statistical_distance", statistical_distance},
            {"holds", holds}};
}

namespace {

void assert_bound(const BoundRecord& r) {
    std::ostringstream msg;
    msg.precision(17);
    if (r.optimal_value < r.delta - kExact) {
        msg << r.kind << " bound violated: L* = " << r.optimal_value << " < delta = " << r.delta;
        throw TheoremViolationError(msg.str());
    }
    if (std::abs(r.constructed_value - r.delta) > kExact) {
        msg << r.kind << " constructed adversary scores " << r.constructed_value << ", delta is " << r.delta;
        throw TheoremViolationError(msg.str());
    }
}

// Per label slice: h = g when the A=1 side has the larger mean of g,
// otherwise h = 1 - g. Covers every sign case of |E_0[g] - E_1[g]|.
std::vector<int> aligned(std::span<const int> g, const std::vector<double>& p0, const std::vector<double>& p1) {
    const auto gr = as_real(g);
    const bool keep = expect(p1, gr) >= expect(p0, gr);
    std::vector<int> h(g.begin(), g.end());
    if (!keep) {
        for (int& v : h) {
            v = 1 - v;
        }
    }
    return h;
}

}  // namespace

BoundRecord verify_dp_bound(const DiscreteScenario& s, std::span<const int> g) {
    check_binary(g, s.support_size());
    BoundRecord r;
    r.kind = "dp";
    r.delta = delta_dp(s, as_real(g));
    r.optimal_value = optimal_adversary_dp(s).value;
    r.statistical_distance = metrics::total_variation(s.groups());
    r.constructed_h = aligned(g, s.group(0), s.group(1));
    r.constructed_value = dp_objective(s, as_real(r.constructed_h));
    assert_bound(r);
    r.holds = true;
    return r;
}

BoundRecord verify_eopp_bound(const DiscreteScenario& s, std::span<const int> g) {
    require_labeled(s);
    check_binary(g, s.support_size());
    BoundRecord r;
    r.kind = "eopp";
    r.delta = delta_eopp(s, as_real(g));
    r.optimal_value = optimal_adversary_eopp(s).value;
    r.statistical_distance = metrics::total_variation(s.cells(0));
    r.constructed_h = aligned(g, s.cell(0, 0), s.cell(1, 0));
    r.constructed_value = eopp_objective(s, as_real(r.constructed_h));
    assert_bound(r);
    r.holds = true;
    return r;
}

BoundRecord verify_eo_bound(const DiscreteScenario& s, std::span<const int> g) {
    require_labeled(s);
    check_binary(g, s.support_size());
    BoundRecord r;
    r.kind = "eo";
    r.delta = delta_eo(s, as_real(g));
    r.optimal_value = optimal_adversary_eo(s).value;
    r.statistical_distance = metrics::total_variation(s.cells(0)) + metrics::total_variation(s.cells(1));
    // The y=1 term of delta_eo is written on 1 - g; |E_0[1-g] - E_1[1-g]| =
    // |E_0[g] - E_1[g]|, so the same alignment rule applies to both slices.
    auto h0 = aligned(g, s.cell(0, 0), s.cell(1, 0));
    const auto h1 = aligned(g, s.cell(0, 1), s.cell(1, 1));
    r.constructed_value = eo_objective(s, as_real(h0), as_real(h1));
    h0.insert(h0.end(), h1.begin(), h1.end());
    r.constructed_h = std::move(h0);
    assert_bound(r);
    r.holds = true;
    return r;
}

DiscreteScenario appendix_a_scenario() { return DiscreteScenario::from_joint({{0.92, 0.03}, {0.03, 0.02}}); }

double ce_objective(const DiscreteScenario& s, std::span<const double> h) {
    check_soft(h, s.support_size(), "adversary");
    double total = 0.0;
    for (std::size_t z = 0; z < h.size(); ++z) {
        const double hz = std::clamp(h[z], nn::kProbClamp, 1.0 - nn::kProbClamp);
        total += s.mass(z, 1) * std::log(hz) + s.mass(z, 0) * std::log(1.0 - hz);
    }
    return total;
}

AppendixARecord reproduce_appendix_a() {
    const auto s = appendix_a_scenario();
    AppendixARecord r;
    // The cross-entropy maximizer is the posterior p(A=1 | z).
    for (std::size_t z = 0; z < 2; ++z) {
        r.ce_h[z] = s.mass(z, 1) / (s.mass(z, 0) + s.mass(z, 1));
    }
    r.ce_objective = ce_objective(s, r.ce_h);
    r.ce_matches_reported = std::abs(r.ce_objective - r.reported_ce_objective) <= 5e-4;
    for (std::size_t z = 0; z < 2; ++z) {
        r.ce_thresholded[z] = r.ce_h[z] >= 0.5 ? 1 : 0;
    }
    r.ce_test_discrepancy = metrics::test_discrepancy(s.groups(), r.ce_thresholded);
    const auto opt = optimal_adversary_dp(s);
    r.l1_h = opt.h;
    r.l1_objective = opt.value;
    r.l1_expected = 0.92 / 0.95 + 0.02 / 0.05 - 1.0;
    r.l1_matches = std::abs(r.l1_objective - r.l1_expected) <= kExact;
    return r;
}

nlohmann::json AppendixARecord::to_json() const {
    return {{"ce_h", ce_h},
            {"ce_objective", ce_objective},
            {"reported_ce_objective", reported_ce_objective},
            {"ce_matches_reported", ce_matches_reported},
            {"ce_thresholded", ce_thresholded},
            {"ce_test_discrepancy", ce_test_discrepancy},
            {"l1_h", l1_h},
            {"l1_objective", l1_objective},
            {"l1_expected", l1_expected},
            {"l1_matches", l1_matches}};
}

nlohmann::json RelaxationRecord::to_json() const {
    nlohmann::json j{{"kind", kind},
                     {"samples", samples},
                     {"mc_delta", mc_delta},
                     {"mc_delta_se", mc_delta_se},
                     {"mc_adversary", mc_adversary},
                     {"mc_adversary_se", mc_adversary_se},
                     {"exact_delta", exact_delta},
                     {"exact_adversary", exact_adversary},
                     {"holds", holds}};
    j["mc_given_adversary"] = mc_given_adversary ? nlohmann::json(*mc_given_adversary) : nlohmann::json();
    return j;
}

RelaxationRecord verify_randomized_relaxation(const DiscreteScenario& s, std::span<const double> g_soft,
                                              std::span<const double> h_soft, std::size_t samples,
                                              std::uint64_t seed) {
    const std::size_t k = s.support_size();
    check_soft(g_soft, k, "classifier");
    const bool eo = s.labeled();
    const std::size_t h_len = eo ? 2 * k : k;
    if (!h_soft.empty()) {
        check_soft(h_soft, h_len, "adversary");
    }
    if (samples == 0) {
        throw InputError("relaxation check needs at least one sample");
    }
    const auto optimum = eo ? optimal_adversary_eo(s) : optimal_adversary_dp(s);

    RelaxationRecord r;
    r.kind = eo ? "eo" : "dp";
    r.exact_delta = eo ? delta_eo(s, g_soft) : delta_dp(s, g_soft);
    r.exact_adversary = optimum.value;

    std::mt19937_64 rng(seed);
    const int labels = eo ? 2 : 1;
    const std::size_t per_cell = std::max<std::size_t>(1, samples / static_cast<std::size_t>(2 * labels));
    r.samples = per_cell * static_cast<std::size_t>(2 * labels);

    struct Moments {
        double mean = 0.0;
        double var = 0.0;  // of the mean
    };
    auto moments = [&](const std::vector<double>& xs) {
        Moments m;
        for (double x : xs) {
            m.mean += x;
        }
        m.mean /= static_cast<double>(xs.size());
        if (xs.size() > 1) {
            double ss = 0.0;
            for (double x : xs) {
                ss += (x - m.mean) * (x - m.mean);
            }
            m.var = ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size());
        }
        return m;
    };

    double delta = 0.0;
    double delta_var = 0.0;
    double adv = 0.0;
    double adv_var = 0.0;
    double given = 0.0;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int y = 0; y < labels; ++y) {
        std::array<Moments, 2> mg;
        std::array<Moments, 2> mh;
        std::array<Moments, 2> mgiven;
        for (int a = 0; a < 2; ++a) {
            const auto& p = eo ? s.cell(a, y) : s.group(a);
            std::discrete_distribution<std::size_t> atom(p.begin(), p.end());
            std::vector<double> gs(per_cell);
            std::vector<double> hs(per_cell);
            std::vector<double> hg(per_cell);
            for (std::size_t i = 0; i < per_cell; ++i) {
                const std::size_t z = atom(rng);
                const std::size_t hz = static_cast<std::size_t>(y) * k + z;
                gs[i] = unit(rng) < g_soft[z] ? 1.0 : 0.0;
                hs[i] = unit(rng) < static_cast<double>(optimum.h[hz]) ? 1.0 : 0.0;
                hg[i] = !h_soft.empty() && unit(rng) < h_soft[hz] ? 1.0 : 0.0;
            }
            mg[a] = moments(gs);
            mh[a] = moments(hs);
            mgiven[a] = moments(hg);
        }
        delta += std::abs(mg[0].mean - mg[1].mean);
        delta_var += mg[0].var + mg[1].var;
        adv += mh[1].mean - mh[0].mean;
        adv_var += mh[0].var + mh[1].var;
        given += mgiven[1].mean - mgiven[0].mean;
    }
    r.mc_delta = delta;
    r.mc_delta_se = std::sqrt(delta_var);
    r.mc_adversary = adv;
    r.mc_adversary_se = std::sqrt(adv_var);
    if (!h_soft.empty()) {
        r.mc_given_adversary = given;
    }
    r.holds = r.mc_adversary >= r.mc_delta - 3.0 * std::sqrt(delta_var + adv_var);
    return r;
}

void SuiteConfig::validate() const {
    if (dp_max_support < 1 || dp_max_support > kMaxDpSupport) {
        throw InputError("dp_max_support must be in [1, " + std::to_string(kMaxDpSupport) + "]");
    }
    if (eo_max_support < 1 || eo_max_support > kMaxEoSupport) {
        throw InputError("eo_max_support must be in [1, " + std::to_string(kMaxEoSupport) + "]");
    }
    if (relaxation_scenarios > 0 && relaxation_samples == 0) {
        throw InputError("relaxation_samples must be positive");
    }
}

nlohmann::json SuiteReport::to_json() const {
    return {{"ok", ok()},
            {"dp_checked", dp_checked},
            {"eo_checked", eo_checked},
            {"eopp_checked", eopp_checked},
            {"relaxation_checked", relaxation_checked},
            {"relaxation_failures", relaxation_failures},
            {"max_tv_gap", max_tv_gap},
            {"max_construct_gap", max_construct_gap},
            {"violations", violations},
            {"appendix_a", appendix_a.to_json()}};
}

namespace {

struct TrialOutcome {
    std::optional<BoundRecord> record;
    std::optional<RelaxationRecord> relaxation;
    double tv_gap = 0.0;
    std::string violation;
};

std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t tag, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(tag), static_cast<std::uint32_t>(index),
                      static_cast<std::uint32_t>(index >> 32)};
    return std::mt19937_64(seq);
}

std::vector<int> random_bits(std::size_t k, std::mt19937_64& rng) {
    std::bernoulli_distribution coin(0.5);
    std::vector<int> g(k);
    for (auto& v : g) {
        v = coin(rng) ? 1 : 0;
    }
    return g;
}

TrialOutcome bound_trial(const std::string& kind, std::size_t max_support, std::uint64_t seed, std::size_t index) {
    TrialOutcome out;
    auto rng = trial_rng(seed, kind == "dp" ? 1 : kind == "eo" ? 2 : 3, index);
    std::uniform_int_distribution<std::size_t> support(std::min<std::size_t>(2, max_support), max_support);
    const std::size_t k = support(rng);
    try {
        const auto s = DiscreteScenario::random(k, kind != "dp", rng);
        const auto g = random_bits(k, rng);
        if (kind == "dp") {
            out.record = verify_dp_bound(s, g);
            out.tv_gap = std::abs(out.record->optimal_value - out.record->statistical_distance);
        } else if (kind == "eo") {
            out.record = verify_eo_bound(s, g);
        } else {
            out.record = verify_eopp_bound(s, g);
        }
    } catch (const TheoremViolationError& e) {
        out.violation = kind + " #" + std::to_string(index) + ": " + e.what();
    } catch (const InternalStateError& e) {
        out.violation = kind + " #" + std::to_string(index) + ": " + e.what();
    }
    return out;
}

TrialOutcome relaxation_trial(const SuiteConfig& config, std::size_t index) {
    TrialOutcome out;
    auto rng = trial_rng(config.seed, 4, index);
    const bool labeled = index % 2 == 1;
    std::uniform_int_distribution<std::size_t> support(2, labeled ? std::min<std::size_t>(config.eo_max_support, 6)
                                                                  : std::min<std::size_t>(config.dp_max_support, 10));
    const std::size_t k = support(rng);
    const auto s = DiscreteScenario::random(k, labeled, rng);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> g(k);
    for (auto& v : g) {
        v = unit(rng);
    }
    std::vector<double> h(labeled ? 2 * k : k);
    for (auto& v : h) {
        v = unit(rng);
    }
    out.relaxation = verify_randomized_relaxation(s, g, h, config.relaxation_samples, rng());
    if (out.relaxation->exact_adversary < out.relaxation->exact_delta - kExact) {
        out.violation = "relaxation #" + std::to_string(index) + ": optimal adversary below relaxed delta";
    }
    return out;
}

}  // namespace

SuiteReport run_suite(const SuiteConfig& config) {
    config.validate();
    SuiteReport report;
    report.appendix_a = reproduce_appendix_a();
    if (!report.appendix_a.l1_matches) {
        report.violations.push_back("fixed example: l1 optimum differs from its closed form");
    }
    if (report.appendix_a.ce_test_discrepancy != 0.0) {
        report.violations.push_back("fixed example: thresholded cross-entropy adversary has nonzero discrepancy");
    }

    struct Plan {
        std::string kind;
        std::size_t count;
        std::size_t max_support;
    };
    const std::vector<Plan> plans{{"dp", config.dp_scenarios, config.dp_max_support},
                                  {"eo", config.eo_scenarios, config.eo_max_support},
                                  {"eopp", config.eopp_scenarios, config.eo_max_support}};
    for (const auto& plan : plans) {
        std::vector<TrialOutcome> outcomes(plan.count);
        run_parallel(plan.count, config.jobs, [&](std::size_t i) {
            outcomes[i] = bound_trial(plan.kind, plan.max_support, config.seed, i);
        });
        for (const auto& o : outcomes) {
            if (!o.violation.empty()) {
                report.violations.push_back(o.violation);
                continue;
            }
            report.max_tv_gap = std::max(report.max_tv_gap, o.tv_gap);
            report.max_construct_gap =
                std::max(report.max_construct_gap, std::abs(o.record->constructed_value - o.record->delta));
            if (plan.kind == "dp") {
                ++report.dp_checked;
            } else if (plan.kind == "eo") {
                ++report.eo_checked;
            } else {
                ++report.eopp_checked;
            }
        }
    }

    std::vector<TrialOutcome> relax(config.relaxation_scenarios);
    run_parallel(relax.size(), config.jobs, [&](std::size_t i) { relax[i] = relaxation_trial(config, i); });
    for (const auto& o : relax) {
        ++report.relaxation_checked;
        if (!o.relaxation->holds) {
            ++report.relaxation_failures;
        }
        if (!o.violation.empty()) {
            report.violations.push_back(o.violation);
        }
    }
    return report;
}

}  // namespace laftr::theory
