#include "riskalloc/value_function.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "riskalloc/errors.hpp"

namespace riskalloc {

CoalitionValueFn::CoalitionValueFn(std::size_t n) : n_(n) {
    require(n >= 1, ErrorCode::invalid_argument, "value function needs n >= 1");
    require(n <= Coalition::max_units, ErrorCode::invalid_argument,
            "coalition strategies support at most 64 units");
}

double CoalitionValueFn::value(Coalition c) {
    if (c.empty_set()) return 0.0;
    if (n_ < Coalition::max_units)
        require((c.bits() >> n_) == 0, ErrorCode::invalid_argument,
                "coalition member out of range");
    if (full_table_ready_.load(std::memory_order_acquire))
        return full_table_[c.bits()];
    {
        std::lock_guard<std::mutex> lock(memo_mutex_);
        auto it = memo_.find(c.bits());
        if (it != memo_.end()) return it->second;
    }
    const double v = counted_compute(c);
    {
        std::lock_guard<std::mutex> lock(memo_mutex_);
        memo_.emplace(c.bits(), v);
    }
    return v;
}

const std::vector<double>& CoalitionValueFn::all_values(int threads) {
    if (!full_table_ready_.load(std::memory_order_acquire)) {
        std::lock_guard<std::mutex> lock(memo_mutex_);
        if (!full_table_ready_.load(std::memory_order_relaxed)) {
            require(n_ <= 26, ErrorCode::limit,
                    "full coalition table limited to n <= 26");
            full_table_.resize(std::size_t{1} << n_);
            fill_all(full_table_, threads);
            full_table_ready_.store(true, std::memory_order_release);
        }
    }
    return full_table_;
}

double CoalitionValueFn::counted_compute(Coalition c) {
    evals_.fetch_add(1, std::memory_order_relaxed);
    return compute(c);
}

// ---------------------------------------------------------------------------
// Panel-backed values

class PanelValueFn::Acc final : public CoalitionValueFn::Accumulator {
  public:
    explicit Acc(PanelValueFn& owner)
        : owner_(owner),
          agg_(owner.panel_->scenarios(), 0.0),
          agg_stressed_(owner.measure_.stressed ? owner.measure_.stressed->scenarios()
                                                : 0,
                        0.0) {}

    void reset() override {
        std::fill(agg_.begin(), agg_.end(), 0.0);
        std::fill(agg_stressed_.begin(), agg_stressed_.end(), 0.0);
    }

    void add_unit(std::size_t i) override {
        const auto r = owner_.panel_->row(i);
        for (std::size_t j = 0; j < agg_.size(); ++j) agg_[j] += r[j];
        if (!agg_stressed_.empty()) {
            const auto rs = owner_.measure_.stressed->row(i);
            for (std::size_t j = 0; j < agg_stressed_.size(); ++j)
                agg_stressed_[j] += rs[j];
        }
    }

    double measure() override {
        owner_.evals_.fetch_add(1, std::memory_order_relaxed);
        return owner_.measure_of(agg_, agg_stressed_);
    }

  private:
    PanelValueFn& owner_;
    std::vector<double> agg_;
    std::vector<double> agg_stressed_;
};

PanelValueFn::PanelValueFn(std::shared_ptr<const ExposurePanel> panel,
                           RiskMeasureSpec measure)
    : CoalitionValueFn(panel->units()), panel_(std::move(panel)),
      measure_(std::move(measure)) {
    measure_.validate(panel_.get());
    require(measure_.kind != MeasureKind::sba_delta_eq, ErrorCode::invalid_argument,
            "SBA measure requires a sensitivity set, not a panel");
}

double PanelValueFn::measure_of(std::span<const double> agg,
                                std::span<const double> agg_stressed) const {
    switch (measure_.kind) {
        case MeasureKind::std_dev: return std_dev(agg);
        case MeasureKind::var: return value_at_risk(agg, measure_.alpha);
        case MeasureKind::es: return expected_shortfall(agg, measure_.alpha);
        case MeasureKind::var_plus_svar:
            return var_plus_svar(agg, agg_stressed, measure_.alpha);
        case MeasureKind::sba_delta_eq: break;
    }
    raise(ErrorCode::invalid_argument, "unsupported measure for panel values");
}

double PanelValueFn::compute(Coalition c) {
    std::vector<double> agg = panel_->aggregate(c);
    std::vector<double> agg_stressed;
    if (measure_.stressed) agg_stressed = measure_.stressed->aggregate(c);
    return measure_of(agg, agg_stressed);
}

std::unique_ptr<CoalitionValueFn::Accumulator> PanelValueFn::accumulator() {
    return std::make_unique<Acc>(*this);
}

namespace {

/// Depth-first fill over subsets: child aggregates are fresh copies of the
/// parent plus one row, so every subset's sum is exactly the increasing-
/// index-order sum regardless of traversal or threading.
template <typename Extend, typename Measure>
void fill_subsets(std::size_t n, std::span<double> table, int threads,
                  const Extend& extend, const Measure& measure_at) {
    require(table.size() == (std::size_t{1} << n), ErrorCode::invalid_argument,
            "subset table must have 2^n entries");
    table[0] = 0.0;

    // Iterative DFS per top-level branch b: masks whose lowest set bit is b.
    auto run_branch = [&](std::size_t b, auto& state) {
        extend(state, 0, b);  // depth-0 buffer now holds {b}
        table[std::uint64_t{1} << b] = measure_at(state, 0, Coalition::single(b));
        // stack of (mask, depth, next unit to try)
        struct Frame {
            std::uint64_t mask;
            std::size_t depth;
            std::size_t next;
        };
        std::vector<Frame> stack{{std::uint64_t{1} << b, 0, b + 1}};
        while (!stack.empty()) {
            Frame& f = stack.back();
            if (f.next >= n) {
                stack.pop_back();
                continue;
            }
            const std::size_t i = f.next++;
            const std::uint64_t child_mask = f.mask | (std::uint64_t{1} << i);
            extend(state, f.depth + 1, i);  // depth+1 buffer = depth buffer + row i
            table[child_mask] = measure_at(state, f.depth + 1, Coalition(child_mask));
            stack.push_back({child_mask, f.depth + 1, i + 1});
        }
    };

    if (threads <= 1 || n < 4) {
        auto state = measure_at.make_state(n);
        for (std::size_t b = 0; b < n; ++b) run_branch(b, state);
        return;
    }
    std::atomic<std::size_t> next_branch{0};
    const std::size_t workers = std::min<std::size_t>(threads, n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            auto state = measure_at.make_state(n);
            for (;;) {
                const std::size_t b = next_branch.fetch_add(1);
                if (b >= n) return;
                run_branch(b, state);
            }
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace

void PanelValueFn::fill_all(std::span<double> table, int threads) {
    const std::size_t m = panel_->scenarios();
    const std::size_t ms = measure_.stressed ? measure_.stressed->scenarios() : 0;

    struct State {
        std::vector<std::vector<double>> agg;      // per depth
        std::vector<std::vector<double>> agg_s;    // per depth (stressed)
    };
    struct Ops {
        PanelValueFn* self;
        std::size_t m, ms;
        State make_state(std::size_t n) const {
            State s;
            s.agg.assign(n, std::vector<double>(m));
            if (ms) s.agg_s.assign(n, std::vector<double>(ms));
            return s;
        }
        double operator()(State& s, std::size_t depth, Coalition) const {
            self->evals_.fetch_add(1, std::memory_order_relaxed);
            return self->measure_of(s.agg[depth],
                                    ms ? std::span<const double>(s.agg_s[depth])
                                       : std::span<const double>{});
        }
    };
    Ops ops{this, m, ms};

    auto extend = [&](State& s, std::size_t depth, std::size_t unit) {
        const auto r = panel_->row(unit);
        if (depth == 0) {
            std::copy(r.begin(), r.end(), s.agg[0].begin());
        } else {
            const auto& parent = s.agg[depth - 1];
            auto& child = s.agg[depth];
            for (std::size_t j = 0; j < m; ++j) child[j] = parent[j] + r[j];
        }
        if (ms) {
            const auto rs = measure_.stressed->row(unit);
            if (depth == 0) {
                std::copy(rs.begin(), rs.end(), s.agg_s[0].begin());
            } else {
                const auto& parent = s.agg_s[depth - 1];
                auto& child = s.agg_s[depth];
                for (std::size_t j = 0; j < ms; ++j) child[j] = parent[j] + rs[j];
            }
        }
    };

    fill_subsets(n_, table, threads, extend, ops);
}

// ---------------------------------------------------------------------------
// SBA-backed values

class SbaValueFn::Acc final : public CoalitionValueFn::Accumulator {
  public:
    explicit Acc(SbaValueFn& owner) : owner_(owner) { reset(); }

    void reset() override {
        net_.assign(owner_.params_->bucket_count, {});
        for (std::size_t b = 0; b < owner_.params_->bucket_count; ++b)
            net_[b].assign(owner_.params_->factors_per_bucket[b], 0.0);
    }

    void add_unit(std::size_t i) override {
        for (const auto& [bucket, values] : owner_.sensitivities_->unit(i))
            for (std::size_t k = 0; k < values.size(); ++k) net_[bucket][k] += values[k];
    }

    double measure() override {
        owner_.evals_.fetch_add(1, std::memory_order_relaxed);
        return sba_delta_eq(net_, *owner_.params_);
    }

  private:
    SbaValueFn& owner_;
    std::vector<std::vector<double>> net_;
};

SbaValueFn::SbaValueFn(std::shared_ptr<const SensitivitySet> sensitivities,
                       std::shared_ptr<const SbaParams> params)
    : CoalitionValueFn(sensitivities->units()), sensitivities_(std::move(sensitivities)),
      params_(std::move(params)) {
    params_->validate();
    sensitivities_->check_against(*params_);
}

double SbaValueFn::compute(Coalition c) {
    return sba_delta_eq(*sensitivities_, c, *params_);
}

std::unique_ptr<CoalitionValueFn::Accumulator> SbaValueFn::accumulator() {
    return std::make_unique<Acc>(*this);
}

void SbaValueFn::fill_all(std::span<double> table, int threads) {
    struct State {
        std::vector<std::vector<std::vector<double>>> net;  // per depth, per bucket
    };
    struct Ops {
        SbaValueFn* self;
        State make_state(std::size_t n) const {
            State s;
            s.net.assign(n, {});
            for (auto& depth_net : s.net) {
                depth_net.assign(self->params_->bucket_count, {});
                for (std::size_t b = 0; b < self->params_->bucket_count; ++b)
                    depth_net[b].assign(self->params_->factors_per_bucket[b], 0.0);
            }
            return s;
        }
        double operator()(State& s, std::size_t depth, Coalition) const {
            self->evals_.fetch_add(1, std::memory_order_relaxed);
            return sba_delta_eq(s.net[depth], *self->params_);
        }
    };
    Ops ops{this};

    auto extend = [&](State& s, std::size_t depth, std::size_t unit) {
        if (depth == 0) {
            for (auto& bucket : s.net[0])
                std::fill(bucket.begin(), bucket.end(), 0.0);
        } else {
            s.net[depth] = s.net[depth - 1];
        }
        for (const auto& [bucket, values] : sensitivities_->unit(unit))
            for (std::size_t k = 0; k < values.size(); ++k)
                s.net[depth][bucket][k] += values[k];
    };

    fill_subsets(n_, table, threads, extend, ops);
}

// ---------------------------------------------------------------------------
// Problems

PanelProblem::PanelProblem(std::shared_ptr<const ExposurePanel> panel,
                           RiskMeasureSpec measure)
    : panel_(std::move(panel)), measure_(std::move(measure)) {
    measure_.validate(panel_.get());
}

std::shared_ptr<CoalitionValueFn> PanelProblem::value_fn() const {
    if (!cached_vf_) cached_vf_ = std::make_shared<PanelValueFn>(panel_, measure_);
    return cached_vf_;
}

std::unique_ptr<AllocationProblem> PanelProblem::regrouped(
    const std::vector<std::vector<int>>& groups,
    const std::vector<std::string>& group_ids) const {
    auto grouped_panel =
        std::make_shared<ExposurePanel>(panel_->grouped(groups, group_ids));
    RiskMeasureSpec measure = measure_;
    if (measure.stressed)
        measure.stressed = std::make_shared<ExposurePanel>(
            measure.stressed->grouped(groups, group_ids));
    return std::make_unique<PanelProblem>(std::move(grouped_panel), std::move(measure));
}

SbaProblem::SbaProblem(std::shared_ptr<const SensitivitySet> sensitivities,
                       std::shared_ptr<const SbaParams> params)
    : sensitivities_(std::move(sensitivities)), params_(std::move(params)) {
    params_->validate();
    sensitivities_->check_against(*params_);
}

std::shared_ptr<CoalitionValueFn> SbaProblem::value_fn() const {
    if (!cached_vf_) cached_vf_ = std::make_shared<SbaValueFn>(sensitivities_, params_);
    return cached_vf_;
}

std::unique_ptr<AllocationProblem> SbaProblem::regrouped(
    const std::vector<std::vector<int>>& groups,
    const std::vector<std::string>& group_ids) const {
    auto grouped = std::make_shared<SensitivitySet>(
        sensitivities_->grouped(groups, group_ids));
    return std::make_unique<SbaProblem>(std::move(grouped), params_);
}

}  // namespace riskalloc
