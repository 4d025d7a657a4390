#include "raman/de.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "raman/parallel.hpp"
#include "raman/propagate.hpp"
#include "raman/rng.hpp"
#include "raman/units.hpp"

namespace raman {

double mae_cost(const Matrix& a, const Matrix& b) {
  if (!a.same_shape(b))
    throw std::invalid_argument("mae_cost: shape mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i)
    worst = std::max(worst, std::abs(a.data[i] - b.data[i]));
  return worst;
}

double mae_cost(const PowerProfile2D& p, const PowerProfile2D& target) {
  p.require_same_grids(target, "mae_cost");
  return mae_cost(p.values, target.values);
}

double j0(const Matrix& m) {
  double worst = 0.0;
  for (std::size_t k = 0; k < m.cols; ++k) {
    double mx = m.at(0, k), mn = m.at(0, k);
    for (std::size_t c = 1; c < m.rows; ++c) {
      mx = std::max(mx, m.at(c, k));
      mn = std::min(mn, m.at(c, k));
    }
    worst = std::max(worst, mx - mn);
  }
  return worst;
}

double j0(const PowerProfile2D& p) { return j0(p.values); }

double j1(const GainSpectrum& gain, double target_gain_db) {
  double worst = 0.0;
  for (double g : gain.values_db)
    worst = std::max(worst, std::abs(g - target_gain_db));
  return worst;
}

void CostSpec::validate() const {
  if (const auto* fg = std::get_if<FlatGainSpec>(&mode)) {
    if (!(fg->m0 > 0) || !(fg->m1 > 0) ||
        std::abs(fg->m0 + fg->m1 - 1.0) > 1e-9)
      throw std::invalid_argument(
          "CostSpec: flat-gain weights need m0, m1 > 0 and m0 + m1 = 1");
    if (!std::isfinite(fg->target_gain_db))
      throw std::invalid_argument("CostSpec: target gain must be finite");
  }
}

PumpCost make_cost(const CostSpec& spec, const ProfileEvaluator& evaluator,
                   const std::array<double, kNumPumps>& pump_freqs_thz) {
  spec.validate();
  (void)pump_freqs_thz;
  if (const auto* tp = std::get_if<TargetProfileSpec>(&spec.mode)) {
    PowerProfile2D target = tp->target;
    return [target, evaluator](const PumpVector& p) {
      return mae_cost(evaluator(p), target);
    };
  }
  const FlatGainSpec fg = std::get<FlatGainSpec>(spec.mode);
  PumpVector off;
  off.fill(kOffDbm);
  PowerProfile2D off_profile = evaluator(off);  // cached for the whole run
  return [fg, evaluator, off_profile](const PumpVector& p) {
    const PowerProfile2D prof = evaluator(p);
    const GainSpectrum g = on_off_gain(prof, off_profile);
    return fg.m0 * j0(prof) + fg.m1 * j1(g, fg.target_gain_db);
  };
}

double weighted_cost(const PumpVector& pumps, const CostSpec& spec,
                     const ProfileEvaluator& evaluator,
                     const std::array<double, kNumPumps>& pump_freqs_thz) {
  return make_cost(spec, evaluator, pump_freqs_thz)(pumps);
}

PumpBounds cnn_init_bounds(const PumpVector& p_prime_dbm,
                           const PumpBounds& global) {
  global.validate();
  PumpBounds out;
  for (int j = 0; j < kNumPumps; ++j) {
    if (!std::isfinite(p_prime_dbm[j]))
      throw std::invalid_argument("cnn_init_bounds: p' must be finite");
    const double mw = dbm_to_mw(p_prime_dbm[j]);
    const double lo = mw_to_dbm(0.5 * mw);
    const double hi = mw_to_dbm(1.5 * mw);
    out.lower[j] = std::max(lo, global.lower[j]);
    out.upper[j] = std::min(hi, global.upper[j]);
    if (out.lower[j] > out.upper[j]) {
      std::cerr << "cnn_init_bounds: window around p'[" << j + 1 << "] = "
                << p_prime_dbm[j]
                << " dBm does not intersect the global bounds; "
                   "falling back to the global range\n";
      out.lower[j] = global.lower[j];
      out.upper[j] = global.upper[j];
    }
  }
  return out;
}

void DeParams::validate() const {
  if (population < 4)
    throw std::invalid_argument("DeParams: population must be >= 4");
  if (!(differential_weight > 0) || differential_weight > 2)
    throw std::invalid_argument("DeParams: need 0 < F <= 2");
  if (crossover_rate < 0 || crossover_rate > 1)
    throw std::invalid_argument("DeParams: need 0 <= CR <= 1");
  if (max_iterations < 0)
    throw std::invalid_argument("DeParams: max_iterations must be >= 0");
  if (stagnation_window < 1)
    throw std::invalid_argument("DeParams: stagnation window must be >= 1");
}

namespace {

double clamp_reflect(double v, double lo, double hi) {
  if (v < lo) v = 2 * lo - v;
  if (v > hi) v = 2 * hi - v;
  return std::clamp(v, lo, hi);
}

// Evaluate members [which] of pop in parallel; on failure, resample that
// member once (serially, fixed order) and retry. RNG state only advances in
// the serial resample pass, so results are thread-count independent.
void evaluate_members(const PumpCost& cost, const PumpBounds& bounds,
                      std::vector<PumpVector>& pop,
                      const std::vector<int>& which, std::vector<double>& out,
                      bool parallel, Rng& rng, long long& evals) {
  const int n = static_cast<int>(which.size());
  std::vector<int> failed(n, 0);
  auto eval_one = [&](int i) {
    try {
      out[which[i]] = cost(pop[which[i]]);
    } catch (...) {
      failed[i] = 1;
    }
  };
  if (parallel) {
    parallel_for(n, eval_one);
  } else {
    for (int i = 0; i < n; ++i) eval_one(i);
  }
  evals += n;
  for (int i = 0; i < n; ++i) {
    if (!failed[i]) continue;
    PumpVector& member = pop[which[i]];
    for (int j = 0; j < kNumPumps; ++j)
      member[j] = rng.uniform(bounds.lower[j], bounds.upper[j]);
    out[which[i]] = cost(member);  // second failure propagates and aborts
    ++evals;
  }
}

}  // namespace

DeResult de_optimize(const PumpCost& cost, const PumpBounds& bounds,
                     const DeParams& params, const DeInit& init) {
  params.validate();
  bounds.validate();

  PumpBounds box = bounds;
  if (init.mode == DeInit::Mode::Seeded)
    box = cnn_init_bounds(init.p_prime, bounds);

  const int np = params.population;
  Rng rng(params.seed);

  std::vector<PumpVector> pop(np);
  for (PumpVector& m : pop)
    for (int j = 0; j < kNumPumps; ++j)
      m[j] = rng.uniform(box.lower[j], box.upper[j]);
  if (init.mode == DeInit::Mode::Seeded) {
    PumpVector seed_member = init.p_prime;
    for (int j = 0; j < kNumPumps; ++j)
      seed_member[j] = std::clamp(seed_member[j], box.lower[j], box.upper[j]);
    pop[0] = seed_member;
  }

  DeResult res;
  res.bounds_used = box;
  std::vector<double> costs(np);
  std::vector<int> all(np);
  for (int i = 0; i < np; ++i) all[i] = i;
  evaluate_members(cost, box, pop, all, costs, params.parallel, rng,
                   res.evaluations);

  auto best_index = [&] {
    return static_cast<int>(std::min_element(costs.begin(), costs.end()) -
                            costs.begin());
  };
  int best = best_index();
  res.history.push_back(costs[best]);
  res.best_pumps_history.push_back(pop[best]);

  std::vector<PumpVector> trials(np);
  std::vector<double> trial_costs(np);
  for (int gen = 0; gen < params.max_iterations; ++gen) {
    // Trial generation is serial so the RNG stream is fixed.
    for (int i = 0; i < np; ++i) {
      int a, b, c;
      do a = static_cast<int>(rng.below(np)); while (a == i);
      do b = static_cast<int>(rng.below(np)); while (b == i || b == a);
      do c = static_cast<int>(rng.below(np)); while (c == i || c == a || c == b);
      const int forced = static_cast<int>(rng.below(kNumPumps));
      PumpVector trial = pop[i];
      for (int j = 0; j < kNumPumps; ++j) {
        const double u = rng.uniform01();
        if (u < params.crossover_rate || j == forced) {
          const double mutant =
              pop[a][j] + params.differential_weight * (pop[b][j] - pop[c][j]);
          trial[j] = clamp_reflect(mutant, box.lower[j], box.upper[j]);
        }
      }
      trials[i] = trial;
    }
    evaluate_members(cost, box, trials, all, trial_costs, params.parallel, rng,
                     res.evaluations);
    for (int i = 0; i < np; ++i) {
      if (trial_costs[i] <= costs[i]) {  // greedy selection
        pop[i] = trials[i];
        costs[i] = trial_costs[i];
      }
    }
    // Greedy selection makes the population best non-increasing by
    // construction, so this history is monotone.
    best = best_index();
    res.history.push_back(costs[best]);
    res.best_pumps_history.push_back(pop[best]);

    const int g = static_cast<int>(res.history.size()) - 1;
    if (g >= params.stagnation_window &&
        res.history[g - params.stagnation_window] - res.history[g] <
            params.stagnation_tol_db)
      break;
  }

  res.best_cost = res.history.back();
  res.best_pumps = res.best_pumps_history.back();
  return res;
}

}  // namespace raman
