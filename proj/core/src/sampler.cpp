//
// Project hierflow - Copyright 2026 The hierflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "hierflow/sampler.h"

#include <cmath>
#include <random>
#include <stdexcept>

#include "hierflow/error.h"
#include "hierflow/rings.h"

namespace hierflow {
namespace {
  int argmax(const Eigen::Ref<const Eigen::RowVectorXd> &row) {
    int best = 0;
    for (int k = 1; k < row.size(); ++k) {
      if (row[k] > row[best])
        best = k;
    }
    return best;
  }

  void require_finite(const StateGradient &g, const char *what) {
    if (!g.all_finite())
      throw NumericalError(std::string("non-finite drift from ") + what);
  }
}  // namespace

/* SamplerConfig */

void SamplerConfig::validate() const {
  if (steps < 1)
    throw std::invalid_argument("sampler.steps must be at least 1");
  if (!(eps > 0.0))
    throw std::invalid_argument("sampler.eps must be positive");
  if (!(t_geom >= 0.0 && t_geom <= 1.0) || !(t_conn >= 0.0 && t_conn <= 1.0))
    throw std::invalid_argument("sampler thresholds must lie in [0, 1]");
  if (conn_every < 1)
    throw std::invalid_argument("sampler.conn_every must be at least 1");
  if (hyperbolic.dim < 1 || !(hyperbolic.curvature > 0.0)
      || !(hyperbolic.tau > 0.0))
    throw std::invalid_argument("invalid hyperbolic settings");
}

nlohmann::json SamplerConfig::to_json() const {
  return { { "steps", steps },
           { "solver", "heun" },
           { "eps", eps },
           { "t_geom", t_geom },
           { "t_conn", t_conn },
           { "conn_every", conn_every },
           { "conn_early", conn_early },
           { "chem", chem },
           { "cons", cons },
           { "geom", geom },
           { "repair", repair },
           { "record_trajectory", record_trajectory },
           { "hyperbolic",
             { { "dim", hyperbolic.dim },
               { "curvature", hyperbolic.curvature },
               { "d_thresh", hyperbolic.d_thresh },
               { "tau", hyperbolic.tau } } } };
}

SamplerConfig SamplerConfig::from_json(const nlohmann::json &j) {
  SamplerConfig c;
  for (const auto &[key, v]: j.items()) {
    if (key == "steps")
      c.steps = v.get<int>();
    else if (key == "solver") {
      if (v.get<std::string>() != "heun")
        throw std::invalid_argument("sampler.solver: only heun is supported");
    } else if (key == "eps")
      c.eps = v.get<double>();
    else if (key == "t_geom")
      c.t_geom = v.get<double>();
    else if (key == "t_conn")
      c.t_conn = v.get<double>();
    else if (key == "conn_every")
      c.conn_every = v.get<int>();
    else if (key == "conn_early")
      c.conn_early = v.get<bool>();
    else if (key == "chem")
      c.chem = v.get<bool>();
    else if (key == "cons")
      c.cons = v.get<bool>();
    else if (key == "geom")
      c.geom = v.get<bool>();
    else if (key == "repair")
      c.repair = v.get<bool>();
    else if (key == "record_trajectory")
      c.record_trajectory = v.get<bool>();
    else if (key == "hyperbolic") {
      c.hyperbolic.dim = v.value("dim", c.hyperbolic.dim);
      c.hyperbolic.curvature = v.value("curvature", c.hyperbolic.curvature);
      c.hyperbolic.d_thresh = v.value("d_thresh", c.hyperbolic.d_thresh);
      c.hyperbolic.tau = v.value("tau", c.hyperbolic.tau);
    } else
      throw std::invalid_argument("sampler: unknown key " + key);
  }
  c.validate();
  return c;
}

/* Sampler */

Eigen::MatrixXd leaf_similarity(const RelaxedState &state,
                                const Eigen::MatrixXd &hyp,
                                const HyperbolicConfig &cfg) {
  const int n = state.num_atoms();
  if (hyp.rows() != state.num_tokens())
    throw std::invalid_argument("leaf_similarity: token count mismatch");
  std::vector<Eigen::VectorXd> pts(n);
  for (int i = 0; i < n; ++i)
    pts[i] = clamp_to_ball(hyp.row(state.leaf_anchor[i]).transpose(),
                           cfg.curvature);
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double d = poincare_distance(pts[i], pts[j], cfg.curvature);
      s(i, j) = s(j, i) = hierarchy_similarity(d, cfg.d_thresh, cfg.tau);
    }
  }
  return s;
}

Sampler::Sampler(EnergyModel energies, SamplerConfig config,
                 HierarchyConfig hierarchy)
    : energies_(std::move(energies)), config_(std::move(config)),
      hierarchy_(hierarchy) {
  config_.validate();
}

EnergyInputs Sampler::energy_inputs(const RelaxedState &state,
                                    const EndpointPrediction &pred) const {
  EnergyInputs in;
  if (pred.token_hyperbolic.rows() == state.num_tokens()
      && pred.token_hyperbolic.rows() > 0)
    in.similarity = leaf_similarity(state, pred.token_hyperbolic,
                                    config_.hyperbolic);

  const EnergyConfig &ec = energies_.config();
  if (ec.hier_conn) {
    const std::vector<int> &anchor = state.leaf_anchor;
    std::vector<std::vector<int>> members(state.num_tokens());
    for (int i = 0; i < state.num_atoms(); ++i) {
      const int par = argmax(state.parent_probs.row(anchor[i]));
      if (par > 0)
        members[par].push_back(i);
    }
    for (auto &m: members) {
      if (!m.empty())
        in.motifs.push_back(std::move(m));
    }
  }
  if (ec.ring_closure || ec.ring_exclusivity)
    in.rings = perceive_rings(discretize(state).mol);
  return in;
}

StateGradient Sampler::connectivity_gradient(const RelaxedState &state,
                                             double /*t*/) const {
  const EnergyConfig &ec = energies_.config();
  const EnergyTerm term = ec.connectivity == ConnectivityMode::kLogdet
                              ? EnergyTerm::kConnLogdet
                              : EnergyTerm::kConnLambda2;
  StateGradient g = StateGradient::zeros(state);
  energies_.accumulate(term, state, {}, ec.lambda_conn, g);
  return to_logit_space(state, g);
}

StateVelocity Sampler::drift(const RelaxedState &s,
                             const EndpointPrediction &pred, double t,
                             const DriftOptions &opts) const {
  const int n = s.num_atoms();
  const int a_count = s.num_tokens();
  if (pred.atom_logits.rows() != n || pred.bond_logits.rows() != num_pairs(n)
      || pred.type_logits.rows() != a_count
      || pred.parent_logits.rows() != a_count || pred.coords.rows() != n
      || pred.atom_logits.cols() != s.atom_logits.cols()
      || pred.bond_logits.cols() != s.bond_logits.cols()
      || pred.type_logits.cols() != s.type_logits.cols())
    throw std::invalid_argument("drift: prediction does not match the state");

  const double denom = 1.0 - t + config_.eps;
  StateVelocity v = StateGradient::zeros(s);
  for (int i = 0; i < n; ++i) {
    if (!s.atom_mask[i])
      continue;
    v.atom.row(i) = (pred.atom_logits.row(i) - s.atom_logits.row(i)) / denom;
    v.coords.row(i) = (pred.coords.row(i) - s.coords.row(i)) / denom;
  }
  for (int i = 0, p = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j, ++p) {
      if (s.pair_active(i, j))
        v.bond.row(p) = (pred.bond_logits.row(p) - s.bond_logits.row(p)) / denom;
    }
  }
  for (int a = 0; a < a_count; ++a) {
    if (!s.token_mask[a])
      continue;
    v.type.row(a) = (pred.type_logits.row(a) - s.type_logits.row(a)) / denom;
    for (int b = 0; b < a; ++b) {
      if (s.parent_valid(a, b))
        v.parent(a, b) = (pred.parent_logits(a, b) - s.parent_logits(a, b))
                         / denom;
    }
  }
  require_finite(v, "endpoint term");

  const EnergyConfig &ec = energies_.config();
  if (config_.chem) {
    const double eta = anneal(ec.eta_chem, ec.gamma, t);
    StateGradient g = StateGradient::zeros(s);
    energies_.accumulate(EnergyTerm::kValence, s, {}, ec.lambda_val, g);
    energies_.accumulate(EnergyTerm::kCount, s, {}, ec.lambda_cnt, g);
    StateGradient chem = to_logit_space(s, g);
    if (opts.conn_cache)
      chem += *opts.conn_cache;
    else if (opts.include_conn)
      chem += connectivity_gradient(s, t);
    require_finite(chem, "chemistry guidance");
    v.add_scaled(chem, -eta);
  }

  if (config_.cons) {
    const EnergyInputs in = energy_inputs(s, pred);
    const auto terms = energies_.cons_terms(in);
    if (!terms.empty()) {
      StateGradient g = StateGradient::zeros(s);
      for (const auto &[term, w]: terms)
        energies_.accumulate(term, s, in, w, g);
      StateGradient cons = to_logit_space(s, g);
      cons.coords.setZero();
      require_finite(cons, "consistency guidance");
      v.add_scaled(cons, -anneal(ec.eta_cons, ec.gamma, t));
    }
  }

  if (config_.geom) {
    StateGradient g = StateGradient::zeros(s);
    for (const auto &[term, w]: energies_.geom_terms())
      energies_.accumulate(term, s, {}, w, g);
    StateGradient geom = to_logit_space(s, g);
    require_finite(geom, "geometry guidance");
    v.coords -= anneal(ec.eta_geom, ec.gamma, t) * geom.coords;
    if (opts.geom_to_topology) {
      const double eta_z = anneal(ec.eta_geom_z, ec.gamma, t);
      v.atom -= eta_z * geom.atom;
      v.bond -= eta_z * geom.bond;
    }
  }
  return v;
}

void apply_velocity(RelaxedState &s, const StateVelocity &v, double h) {
  s.atom_logits += h * v.atom;
  s.bond_logits += h * v.bond;
  s.type_logits += h * v.type;
  s.parent_logits += h * v.parent;
  s.coords += h * v.coords;
}

void post_step(RelaxedState &s) {
  if (s.num_active_atoms() > 0)
    s.coords = recenter(s.coords, s.atom_mask);
  s.refresh_probabilities();
}

IntegrationResult Sampler::integrate(RelaxedState x,
                                     const EndpointPredictor &predictor,
                                     const StepObserver &observer) const {
  const int steps = config_.steps;
  const double h = 1.0 / steps;
  const EnergyConfig &ec = energies_.config();
  const bool use_conn = config_.chem && ec.lambda_conn > 0.0;

  IntegrationResult res;
  x.t = 0.0;
  x.refresh_probabilities();
  res.max_simplex_violation = x.simplex_violation();

  StateGradient conn_cache;
  int conn_start = -1;
  for (int k = 0; k < steps; ++k) {
    const double t0 = static_cast<double>(k) / steps;
    const double t1 = static_cast<double>(k + 1) / steps;
    try {
      if (observer)
        observer(k, 0, x);

      DriftOptions opts;
      opts.geom_to_topology = t0 >= config_.t_geom;
      opts.include_conn = use_conn && config_.conn_early;
      if (use_conn && t0 >= config_.t_conn) {
        if (conn_start < 0)
          conn_start = k;
        if ((k - conn_start) % config_.conn_every == 0)
          conn_cache = connectivity_gradient(x, t0);
        opts.conn_cache = &conn_cache;
      }

      const EndpointPrediction p1 = predictor.predict(x, t0);
      if (!p1.all_finite())
        throw NumericalError("predictor output is not finite");
      const StateVelocity k1 = drift(x, p1, t0, opts);

      RelaxedState y = x;
      apply_velocity(y, k1, h);
      y.t = t1;
      y.refresh_probabilities();
      res.max_simplex_violation =
          std::max(res.max_simplex_violation, y.simplex_violation());
      if (observer)
        observer(k, 1, y);

      const EndpointPrediction p2 = predictor.predict(y, t1);
      if (!p2.all_finite())
        throw NumericalError("predictor output is not finite");
      const StateVelocity k2 = drift(y, p2, t1, opts);

      apply_velocity(x, k1, 0.5 * h);
      apply_velocity(x, k2, 0.5 * h);
      x.t = t1;
      if (!x.atom_logits.allFinite() || !x.bond_logits.allFinite()
          || !x.type_logits.allFinite() || !x.parent_logits.allFinite()
          || !x.coords.allFinite())
        throw NumericalError("state is not finite");
      post_step(x);
    } catch (const SolverError &) {
      throw;
    } catch (const NumericalError &e) {
      throw SolverError(k, e.what());
    }

    res.max_simplex_violation =
        std::max(res.max_simplex_violation, x.simplex_violation());
    if (observer)
      observer(k, 2, x);
    if (config_.record_trajectory)
      res.trajectory.push_back(x);
  }
  res.steps = steps;
  res.final = std::move(x);
  return res;
}

IntegrationResult Sampler::sample(const PriorTables &priors,
                                  const TokenVocabulary &vocab,
                                  const EndpointPredictor &predictor,
                                  std::uint64_t seed,
                                  const StepObserver &observer) const {
  std::mt19937_64 rng(seed);
  RelaxedState init =
      sample_prior(priors, vocab, energies_.table(), energies_.orders(),
                   hierarchy_, rng, predictor.size_hint());
  return integrate(std::move(init), predictor, observer);
}

/* Discretization and repair */

Discretized discretize(const RelaxedState &s) {
  std::vector<int> active;
  for (int i = 0; i < s.num_atoms(); ++i) {
    if (s.atom_mask[i])
      active.push_back(i);
  }
  const int m = static_cast<int>(active.size());
  const int n = s.num_atoms();

  Discretized out;
  out.mol = Molecule(m);
  out.confidence = Eigen::MatrixXd::Zero(m, m);
  for (int a = 0; a < m; ++a) {
    out.mol.elements[a] = argmax(s.atom_probs.row(active[a]));
    out.mol.coords.row(a) = s.coords.row(active[a]);
  }
  for (int a = 0; a < m; ++a) {
    for (int b = a + 1; b < m; ++b) {
      const int p = pair_index(active[a], active[b], n);
      const int k = argmax(s.bond_probs.row(p));
      out.mol.bonds(a, b) = out.mol.bonds(b, a) = k;
      out.confidence(a, b) = out.confidence(b, a) = s.bond_probs(p, k);
    }
  }
  return out;
}

RepairResult valence_repair(const Molecule &mol,
                            const Eigen::MatrixXd &confidence,
                            const ElementTable &table,
                            const BondOrders &orders) {
  const int n = mol.size();
  if (confidence.rows() != n || confidence.cols() != n)
    throw std::invalid_argument("valence_repair: confidence shape mismatch");
  RepairResult out { mol, {} };
  for (int i = 0; i < n; ++i) {
    const double cap = table[mol.elements[i]].max_valence;
    while (out.mol.bond_order_sum(i, orders) > cap + 1e-9) {
      int worst = -1;
      for (int j: out.mol.neighbors(i)) {
        if (worst < 0 || confidence(i, j) < confidence(i, worst))
          worst = j;
      }
      out.mol.bonds(i, worst) = out.mol.bonds(worst, i) = 0;
      out.deleted.emplace_back(std::min(i, worst), std::max(i, worst));
    }
  }
  return out;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace hierflow
