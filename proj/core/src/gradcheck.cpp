//
// Project hierflow - Copyright 2026 The hierflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "hierflow/gradcheck.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hierflow/priors.h"

namespace hierflow {

bool GradcheckReport::passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const BlockCheck &c) { return c.passed; });
}

double GradcheckReport::max_rel_err() const {
  double m = 0.0;
  for (const BlockCheck &c: checks)
    m = std::max(m, c.rel_err);
  return m;
}

std::vector<BlockCheck> GradcheckReport::failures() const {
  std::vector<BlockCheck> out;
  std::copy_if(checks.begin(), checks.end(), std::back_inserter(out),
               [](const BlockCheck &c) { return !c.passed; });
  return out;
}

void GradcheckReport::append(const GradcheckReport &other) {
  checks.insert(checks.end(), other.checks.begin(), other.checks.end());
}

nlohmann::json GradcheckReport::to_json() const {
  nlohmann::json fails = nlohmann::json::array();
  for (const BlockCheck &c: failures())
    fails.push_back({ { "block", c.label },
                      { "rel_err", c.rel_err },
                      { "analytic_norm", c.analytic_norm },
                      { "numeric_norm", c.numeric_norm } });
  return { { "checks", checks.size() },
           { "passed", passed() },
           { "max_rel_err", max_rel_err() },
           { "failures", fails } };
}

BlockCheck check_block(const std::string &label,
                       const std::function<double(const Eigen::MatrixXd &)> &eval,
                       const Eigen::MatrixXd &x, const Eigen::MatrixXd &analytic,
                       const GradcheckOptions &opts) {
  if (analytic.rows() != x.rows() || analytic.cols() != x.cols())
    throw std::invalid_argument("check_block: gradient shape mismatch for "
                                + label);
  const double f0 = eval(x);
  Eigen::MatrixXd numeric(x.rows(), x.cols());
  Eigen::MatrixXd probe = x;
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      probe(r, c) = x(r, c) + opts.step;
      const double fp = eval(probe);
      probe(r, c) = x(r, c) - opts.step;
      const double fm = eval(probe);
      probe(r, c) = x(r, c);
      numeric(r, c) = (fp - fm) / (2.0 * opts.step);
    }
  }
  BlockCheck out;
  out.label = label;
  out.analytic_norm = analytic.size() ? analytic.cwiseAbs().maxCoeff() : 0.0;
  out.numeric_norm = numeric.size() ? numeric.cwiseAbs().maxCoeff() : 0.0;
  const double err =
      numeric.size() ? (analytic - numeric).cwiseAbs().maxCoeff() : 0.0;
  const double denom =
      std::max({ out.analytic_norm, out.numeric_norm,
                 opts.floor * std::max(1.0, std::abs(f0)) });
  out.rel_err = err / denom;
  out.passed = std::isfinite(out.rel_err) && out.rel_err < opts.tolerance;
  return out;
}

RelaxedState random_relaxed_state(std::mt19937_64 &rng,
                                  const RandomStateOptions &o) {
  const int a_count = 1 + o.max_motifs + o.atoms;
  RelaxedState s = RelaxedState::zeros(
      { o.atoms, o.atom_types, o.bond_types, a_count, o.token_types });
  std::normal_distribution<double> logit(0.0, o.logit_scale);
  std::normal_distribution<double> xyz(0.0, o.coord_scale);
  std::uniform_int_distribution<int> motifs(0, o.max_motifs);
  auto fill = [&](Eigen::MatrixXd &m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c)
        m(r, c) = logit(rng);
    }
  };
  fill(s.atom_logits);
  fill(s.bond_logits);
  fill(s.type_logits);
  fill(s.parent_logits);
  for (int i = 0; i < o.atoms; ++i) {
    for (int d = 0; d < 3; ++d)
      s.coords(i, d) = xyz(rng);
  }
  s.atom_mask.assign(o.atoms, true);
  const int m = motifs(rng);
  s.token_mask.assign(a_count, false);
  s.token_mask[0] = true;
  for (int k = 1; k <= m; ++k)
    s.token_mask[k] = true;
  s.leaf_anchor.resize(o.atoms);
  for (int i = 0; i < o.atoms; ++i) {
    s.leaf_anchor[i] = leaf_token(i, o.max_motifs);
    s.token_mask[s.leaf_anchor[i]] = true;
  }
  for (int a = 0; a < a_count; ++a) {
    for (int b = 0; b < a_count; ++b) {
      if (a == 0 || !s.parent_valid(a, b))
        s.parent_logits(a, b) = 0.0;
    }
  }
  s.refresh_probabilities();
  return s;
}

EnergyInputs random_energy_inputs(std::mt19937_64 &rng,
                                  const RelaxedState &s) {
  const int n = s.num_atoms();
  EnergyInputs in;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  in.similarity = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j)
      in.similarity(i, j) = in.similarity(j, i) = unit(rng);
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  if (n >= 2) {
    const int split = std::max(2, n / 2);
    in.motifs.emplace_back(order.begin(), order.begin() + split);
    if (n - split >= 2)
      in.motifs.emplace_back(order.begin() + split, order.end());
  }
  if (n >= 3) {
    const int k = std::min(n, 3 + static_cast<int>(unit(rng) * 3));
    Ring ring(order.begin(), order.begin() + k);
    in.rings.push_back(ring);
  }
  return in;
}

GradcheckReport energy_gradcheck(const EnergyModel &model,
                                 const RelaxedState &state,
                                 const EnergyInputs &inputs,
                                 const GradcheckOptions &opts) {
  GradcheckReport report;
  for (EnergyTerm term: kAllEnergyTerms) {
    StateGradient g;
    model.term(term, state, inputs, &g);
    const std::string name(energy_term_name(term));

    auto with_atoms = [&](const Eigen::MatrixXd &z) {
      RelaxedState s = state;
      s.atom_logits = z;
      s.refresh_probabilities();
      return model.term(term, s, inputs);
    };
    auto with_bonds = [&](const Eigen::MatrixXd &z) {
      RelaxedState s = state;
      s.bond_logits = z;
      s.refresh_probabilities();
      return model.term(term, s, inputs);
    };
    auto with_coords = [&](const Eigen::MatrixXd &x) {
      RelaxedState s = state;
      s.coords = x;
      return model.term(term, s, inputs);
    };
    report.checks.push_back(check_block(name + "/atom", with_atoms,
                                        state.atom_logits, g.atom, opts));
    report.checks.push_back(check_block(name + "/bond", with_bonds,
                                        state.bond_logits, g.bond, opts));
    report.checks.push_back(check_block(name + "/coords", with_coords,
                                        state.coords, g.coords, opts));
  }
  return report;
}

GradcheckReport loss_gradcheck(const EndpointPrediction &pred,
                               const LossTargets &target,
                               const LossWeights &w,
                               const GradcheckOptions &opts) {
  LossGradient g;
  endpoint_losses(pred, target, w, &g);
  auto eval = [&](auto setter) {
    return [&, setter](const Eigen::MatrixXd &m) {
      EndpointPrediction p = pred;
      setter(p, m);
      return endpoint_losses(p, target, w).total;
    };
  };
  GradcheckReport r;
  r.checks.push_back(check_block(
      "loss/atom",
      eval([](EndpointPrediction &p, const Eigen::MatrixXd &m) {
        p.atom_logits = m;
      }),
      pred.atom_logits, g.atom, opts));
  r.checks.push_back(check_block(
      "loss/bond",
      eval([](EndpointPrediction &p, const Eigen::MatrixXd &m) {
        p.bond_logits = m;
      }),
      pred.bond_logits, g.bond, opts));
  r.checks.push_back(check_block(
      "loss/type",
      eval([](EndpointPrediction &p, const Eigen::MatrixXd &m) {
        p.type_logits = m;
      }),
      pred.type_logits, g.type, opts));
  r.checks.push_back(check_block(
      "loss/parent",
      eval([](EndpointPrediction &p, const Eigen::MatrixXd &m) {
        p.parent_logits = m;
      }),
      pred.parent_logits, g.parent, opts));
  r.checks.push_back(check_block(
      "loss/coords",
      eval([](EndpointPrediction &p, const Eigen::MatrixXd &m) {
        p.coords = m;
      }),
      pred.coords, g.coords, opts));
  return r;
}

GradcheckReport run_gradcheck_suite(const EnergyModel &model, int samples,
                                    int max_atoms, std::uint64_t seed,
                                    const GradcheckOptions &opts) {
  if (samples < 1 || max_atoms < 2)
    throw std::invalid_argument("run_gradcheck_suite: need samples >= 1 and "
                                "max_atoms >= 2");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> size(2, max_atoms);
  RandomStateOptions o;
  o.atom_types = model.table().size();
  o.bond_types = model.orders().size();

  GradcheckReport report;
  for (int k = 0; k < samples; ++k) {
    o.atoms = size(rng);
    const RelaxedState s = random_relaxed_state(rng, o);
    const EnergyInputs in = random_energy_inputs(rng, s);
    report.append(energy_gradcheck(model, s, in, opts));

    // Loss instance: hard labels drawn from a second random state.
    const RelaxedState t = random_relaxed_state(rng, o);
    LossTargets target;
    auto argmax_rows = [](const Eigen::MatrixXd &p) {
      std::vector<int> out(p.rows());
      for (Eigen::Index r = 0; r < p.rows(); ++r)
        p.row(r).maxCoeff(&out[r]);
      return out;
    };
    target.elements = argmax_rows(t.atom_probs);
    target.bonds = argmax_rows(t.bond_probs);
    target.types = argmax_rows(t.type_probs);
    target.token_mask = s.token_mask;
    target.parents.assign(s.num_tokens(), -1);
    for (int a = 1; a < s.num_tokens(); ++a) {
      if (s.token_mask[a])
        s.parent_probs.row(a).maxCoeff(&target.parents[a]);
    }
    target.coords = t.coords;
    EndpointPrediction pred;
    pred.atom_logits = s.atom_logits;
    pred.bond_logits = s.bond_logits;
    pred.type_logits = s.type_logits;
    pred.parent_logits = s.parent_logits;
    pred.coords = s.coords;
    report.append(loss_gradcheck(pred, target, {}, opts));
  }
  return report;
}

}  // namespace hierflow
