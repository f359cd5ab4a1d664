// Copyright 2026 The qbranch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qbranch/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

#include "qbranch/error.hpp"
#include "qbranch/recurrence.hpp"
#include "qbranch/steering.hpp"

namespace qbranch {
namespace {

using J = nlohmann::ordered_json;

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

J complex_j(Complex z) { return J::array({z.real(), z.imag()}); }

J vector_j(const Vector& v) {
  J out = J::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_j(v[i]));
  return out;
}

J state_j(const ProjectiveState& x) { return vector_j(x.amplitudes()); }

J matrix_j(const Matrix& m) {
  J out = J::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    J row = J::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_j(m(r, c)));
    out.push_back(row);
  }
  return out;
}

J opt_j(const std::optional<double>& x) { return x ? J(*x) : J(nullptr); }

J states_j(const std::vector<ProjectiveState>& xs) {
  J out = J::array();
  for (const auto& x : xs) out.push_back(state_j(x));
  return out;
}

J costs_j(const Eigen::MatrixXd& m) {
  J out = J::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    J row = J::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(std::isfinite(m(r, c)) ? J(m(r, c)) : J(nullptr));
    out.push_back(row);
  }
  return out;
}

std::string state_header(int dim) {
  std::string h;
  for (int i = 0; i < dim; ++i) h += ",re_" + std::to_string(i) + ",im_" + std::to_string(i);
  return h;
}

std::string state_cells(const ProjectiveState& x) {
  std::string s;
  for (int i = 0; i < x.dim(); ++i) s += "," + num(x.amplitudes()[i].real()) + "," + num(x.amplitudes()[i].imag());
  return s;
}

const ProjectiveState& require_state(const std::optional<ProjectiveState>& x, const char* what,
                                     const std::string& command) {
  if (!x) throw ConfigError(command + " needs \"" + std::string(what) + "\" in the scenario or on the command line");
  return *x;
}

J chain_j(const StrongChain& c, const RealizedDynamics& dyn) {
  const ChainCost recheck = chain_cost(c.points(), dyn);
  J j;
  j["epsilon"] = c.epsilon();
  j["steps"] = c.steps();
  j["total"] = c.total();
  j["recomputed_total"] = recheck.total;
  j["jump_costs"] = c.jump_costs();
  j["points"] = states_j(c.points());
  return j;
}

J plan_j(const SteeringPlan& p) {
  J j;
  j["tau0"] = p.tau0;
  j["window"] = J::array({p.window_begin, p.window_end});
  j["delta"] = p.delta;
  j["cost"] = p.cost;
  j["source"] = state_j(p.source);
  j["target"] = state_j(p.target);
  j["free_image"] = vector_j(p.free_image);
  j["aligned_target"] = vector_j(p.aligned_target);
  j["generator"] = matrix_j(p.generator);
  j["rotation"] = matrix_j(p.rotation);
  j["h_tilde"] = matrix_j(p.h_tilde.matrix());
  j["closed_form_propagator"] = matrix_j(p.closed_form_propagator.matrix());
  return j;
}

J verification_j(const SteeringVerification& v) {
  J j;
  j["steps"] = v.steps;
  j["fs_error"] = v.fs_error;
  j["propagator_error"] = v.propagator_error;
  j["integrated_cost"] = v.integrated_cost;
  return j;
}

J steered_j(const SteeredRun& run, const RealizedDynamics& dyn) {
  J j;
  j["plan_steps"] = run.plan_steps;
  J plans = J::array();
  for (const auto& p : run.plans) plans.push_back(plan_j(p));
  j["plans"] = plans;
  J checks = J::array();
  double worst_fs = 0.0, worst_prop = 0.0;
  for (const auto& v : run.verifications) {
    checks.push_back(verification_j(v));
    worst_fs = std::max(worst_fs, v.fs_error);
    worst_prop = std::max(worst_prop, v.propagator_error);
  }
  j["verifications"] = checks;
  j["max_ode_fs_error"] = worst_fs;
  j["max_ode_propagator_error"] = worst_prop;
  j["trajectory"] = states_j(run.trajectory);
  j["achieved_final"] = state_j(run.achieved_final);
  j["total_cost"] = run.total_cost;
  j["chain_total"] = run.chain.total();
  j["final_error"] = run.final_error;
  j["composed_propagator"] = matrix_j(composed_propagator(run, dyn.hamiltonian()));
  return j;
}

std::string dump(const J& j) { return j.dump(2) + "\n"; }

SteerOptions steer_options(const Scenario& s) {
  SteerOptions o;
  o.terminal_correction = s.steer.terminal_correction;
  o.ode_steps = s.steer.ode_steps;
  return o;
}

// ---------------------------------------------------------------------------

CommandReport cmd_simulate(const Scenario& s) {
  const RealizedDynamics dyn = s.dynamics();
  const ProjectiveState& x0 = require_state(s.x0, "x0", "simulate");

  Realization r;
  r.states.push_back(x0);
  for (int k = 0; k < s.steps; ++k) {
    try {
      RealizedStep step = dyn.step(r.states.back());
      r.itinerary.push_back(step.label);
      r.states.push_back(std::move(step.state));
    } catch (const AdmissibilityError& e) {
      throw AdmissibilityError("at step " + std::to_string(k) + ": " + e.what());
    }
  }
  const bool compatible = verify_compatibility(r, dyn.step_unitary(), dyn.observable(), dyn.rule());

  std::vector<int> labels;
  for (const auto& l : r.itinerary) labels.push_back(l.value);
  std::map<int, int> counts;
  for (int l : labels) ++counts[l];
  J count_j = J::object();
  for (const auto& [l, c] : counts) count_j[std::to_string(l)] = c;

  std::ostringstream csv;
  csv << "step" << state_header(dyn.dim()) << ",label\n";
  for (int k = 0; k <= s.steps; ++k) {
    const int label = k < s.steps ? labels[k] : dyn.label(r.states[k]).value;
    csv << k << state_cells(r.states[k]) << "," << label << "\n";
  }

  J j;
  j["command"] = "simulate";
  j["dim"] = dyn.dim();
  j["rule"] = dyn.rule().name();
  j["steps"] = s.steps;
  j["x0"] = state_j(x0);
  j["itinerary"] = labels;
  j["label_counts"] = count_j;
  j["compatible"] = compatible;
  j["final_state"] = state_j(r.states.back());
  return {"simulate", dump(j), {{"states.csv", csv.str()}}};
}

CommandReport cmd_steer(const Scenario& s) {
  const RealizedDynamics dyn = s.dynamics();
  const HermitianMatrix& h = dyn.hamiltonian();
  const ProjectiveState& u = require_state(s.x0, "x0", "steer");
  const ProjectiveState& v = require_state(s.target, "target", "steer");
  const SteerWindow& w = s.steer;
  const SteeringPlan plan = synthesize_steering(u, h, w.tau0, w.tau, w.tau1, v);

  const Vector at_window = evolve(h, w.tau, w.tau0).matrix() * u.amplitudes();
  const Vector reached = plan.closed_form_propagator.matrix() * at_window;
  const Matrix& k = plan.generator;
  const Eigen::JacobiSVD<Matrix> svd(k);
  int rank = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()[i] > 1e-12 * std::max(1.0, svd.singularValues()[0])) ++rank;

  J residuals;
  residuals["fs_error"] = fs_distance(reached, v.amplitudes());
  residuals["generator_skew_defect"] = operator_norm(k + k.adjoint());
  residuals["generator_rank"] = rank;
  residuals["rotation_vs_closed_form"] = operator_norm(plan.rotation - plan.closed_form_propagator.matrix() *
                                                                          evolve(h, w.tau1, w.tau).adjoint().matrix());

  J j;
  j["command"] = "steer";
  j["dim"] = dyn.dim();
  j["plan"] = plan_j(plan);
  j["closed_form"] = residuals;
  j["cost"] = plan.cost;
  j["delta"] = plan.delta;

  std::ostringstream csv;
  csv << "t,perturbation_norm\n";
  const int samples = 101;
  for (int i = 0; i < samples; ++i) {
    const double t = w.tau + (w.tau1 - w.tau) * i / (samples - 1.0);
    const Matrix dh = perturbation_at(plan, h, t).matrix();
    csv << num(t) << "," << num(hermitian_norm(dh)) << "\n";
  }
  if (w.ode_steps > 0) {
    const SteeringVerification ver = verify_steering_by_integration(plan, h, w.ode_steps);
    j["ode"] = verification_j(ver);
  } else {
    j["ode"] = nullptr;
  }
  return {"steer", dump(j), {{"steer_profile.csv", csv.str()}}};
}

StateNet build_net(const Scenario& s, const RealizedDynamics& dyn, std::vector<ProjectiveState> pinned,
                   const std::string& command) {
  if (!s.has_net) throw ConfigError(command + " needs a \"net\" section");
  return StateNet::sample(dyn, s.net, std::move(pinned));
}

std::string nodes_csv(const StateNet& net) {
  std::ostringstream csv;
  csv << "node" << state_header(net.nodes().front().dim()) << ",pinned\n";
  for (int i = 0; i < net.size(); ++i) csv << i << state_cells(net.nodes()[i]) << "," << (i < net.pinned_count()) << "\n";
  return csv.str();
}

std::string chain_csv(const StrongChain& c) {
  std::ostringstream csv;
  csv << "index" << state_header(c.points().front().dim()) << ",jump_cost\n";
  for (int i = 0; i <= c.steps(); ++i)
    csv << i << state_cells(c.points()[i]) << "," << (i < c.steps() ? num(c.jump_costs()[i]) : std::string()) << "\n";
  return csv.str();
}

// One row per chain step: the jump into point i+1 and the plan steering it.
std::string steered_csv(const SteeredRun& run) {
  std::ostringstream csv;
  csv << "step,point,jump_cost,plan_delta,plan_cost,window_begin,window_end\n";
  const auto& jumps = run.chain.jump_costs();
  for (std::size_t i = 0; i < jumps.size(); ++i) {
    csv << i << "," << i + 1 << "," << num(jumps[i]);
    const auto it = std::find(run.plan_steps.begin(), run.plan_steps.end(), static_cast<int>(i) + 1);
    if (it != run.plan_steps.end()) {
      const SteeringPlan& p = run.plans[it - run.plan_steps.begin()];
      csv << "," << num(p.delta) << "," << num(p.cost) << "," << num(p.window_begin) << "," << num(p.window_end);
    } else {
      csv << ",,,,";
    }
    csv << "\n";
  }
  return csv.str();
}

J net_j(const StateNet& net) {
  J j;
  j["size"] = net.size();
  j["pinned"] = net.pinned_count();
  j["dense"] = net.dense();
  j["coverage_radius"] = net.coverage_radius();
  return j;
}

CommandReport cmd_chain_search(const Scenario& s) {
  const RealizedDynamics dyn = s.dynamics();
  const ProjectiveState& x0 = require_state(s.x0, "x0", "chain-search");
  const ProjectiveState& target = require_state(s.target, "target", "chain-search");
  std::vector<ProjectiveState> pinned{x0, target};
  pinned.insert(pinned.end(), s.pinned.begin(), s.pinned.end());
  const StateNet net = build_net(s, dyn, pinned, "chain-search");

  SearchOptions opts;
  opts.max_hops = s.budgets.max_hops;
  const PathResult path = min_cost_search(net, 0, 1, opts);
  const StrongChain chain = path_to_chain(net, path, dyn);

  J j;
  j["command"] = "chain-search";
  j["net"] = net_j(net);
  j["epsilon"] = s.epsilon;
  j["cost"] = path.cost;
  j["feasible"] = path.cost < s.epsilon;
  j["path"] = path.path;
  j["chain"] = chain_j(chain, dyn);
  std::vector<Artifact> files{{"chain.csv", chain_csv(chain)}, {"net_nodes.csv", nodes_csv(net)}};
  if (chain.steps() >= 1) {
    const SteeredRun run = steer_along_chain(chain, dyn, steer_options(s));
    j["steered_run"] = steered_j(run, dyn);
    files.push_back({"steered_run.csv", steered_csv(run)});
  } else {
    j["steered_run"] = nullptr;
  }
  return {"chain-search", dump(j), std::move(files)};
}

J sequence_j(const StageSequence& seq, bool replay_ok) {
  J j;
  j["size"] = seq.size();
  j["stages"] = static_cast<int>(seq.stage_starts.size());
  j["stage_starts"] = seq.stage_starts;
  j["termination"] = seq.termination == StageTermination::ExactRevisit ? "exact-revisit" : "budget";
  j["revisit_of"] = seq.revisit_of >= 0 ? J(seq.revisit_of) : J(nullptr);
  J limits = J::array();
  for (const auto& l : seq.limits) {
    J x;
    x["bucket_radius"] = l.bucket_radius;
    x["visit_count"] = l.visit_count;
    x["bucket_index"] = l.bucket_index;
    limits.push_back(x);
  }
  j["limit_stages"] = limits;
  j["replay_ok"] = replay_ok;
  return j;
}

J certificate_j(const RecurrenceCertificate& c, const RealizedDynamics& dyn) {
  J j;
  j["base_index"] = c.base_index;
  j["base_visits"] = c.base_visits;
  j["base_radius"] = c.base_radius;
  j["base_point"] = state_j(c.base);
  j["scales"] = c.scales;
  j["complete"] = c.complete;
  j["nested"] = c.nested;
  J loops = J::array();
  for (const auto& l : c.loops) {
    J x;
    x["epsilon"] = l.epsilon;
    x["found"] = l.found;
    x["cost"] = l.found ? J(l.cost) : J(nullptr);
    x["closing_offset"] = l.found ? J(l.closing_offset) : J(nullptr);
    x["chain"] = l.chain ? chain_j(*l.chain, dyn) : J(nullptr);
    loops.push_back(x);
  }
  j["loops"] = loops;
  return j;
}

std::string certificate_csv(const RecurrenceCertificate& c) {
  std::ostringstream csv;
  csv << "scale,found,loop_length,loop_cost,closing_offset,nested\n";
  for (std::size_t k = 0; k < c.loops.size(); ++k) {
    const auto& l = c.loops[k];
    const bool nested_here = l.found && (k == 0 || l.closing_offset < c.scales[k - 1]);
    csv << num(l.epsilon) << "," << l.found << "," << (l.found ? std::to_string(l.chain->steps()) : "") << ","
        << (l.found ? num(l.cost) : "") << "," << (l.found ? num(l.closing_offset) : "") << "," << nested_here
        << "\n";
  }
  return csv.str();
}

std::string stages_csv(const StageSequence& seq) {
  std::ostringstream csv;
  csv << "index,stage,kind" << state_header(seq.points.front().dim()) << "\n";
  for (int i = 0; i < seq.size(); ++i)
    csv << i << "," << seq.stage_of[i] << "," << (seq.kinds[i] == StageKind::Orbit ? "orbit" : "limit")
        << state_cells(seq.points[i]) << "\n";
  return csv.str();
}

J transitive_j(const TransitiveSetApprox& t) {
  J j;
  j["scale"] = t.scale;
  j["size"] = static_cast<int>(t.members.size());
  j["first_visit"] = t.first_visit;
  j["second_visit"] = t.second_visit;
  j["invariance_gap"] = t.invariance_gap;
  j["max_pairwise"] = t.max_pairwise;
  j["invariant"] = t.invariant;
  j["transitive"] = t.transitive;
  j["members"] = states_j(t.members);
  j["pairwise_costs"] = costs_j(t.pairwise_costs);
  return j;
}

StageBudget stage_budget(const Scenario& s) { return {s.budgets.orbit_len, s.budgets.max_limit_stages}; }

double bucket_radius(const Scenario& s) {
  return s.recurrence.bucket_radius > 0.0 ? s.recurrence.bucket_radius : s.epsilon / 2.0;
}

CertifyOptions certify_options(const Scenario& s) {
  CertifyOptions o;
  o.max_back = s.recurrence.max_back;
  o.refine_nodes = s.recurrence.refine_nodes;
  return o;
}

CommandReport cmd_recurrence(const Scenario& s) {
  const RealizedDynamics dyn = s.dynamics();
  const ProjectiveState& x0 = require_state(s.x0, "x0", "recurrence");
  const StageSequence seq = run_stages(x0, dyn, stage_budget(s), bucket_radius(s), s.recurrence.m_min);
  const bool replay = replay_orbit_stages(seq, dyn);
  const RecurrenceCertificate cert = certify_recurrence(seq, dyn, s.scales, certify_options(s));

  J j;
  j["command"] = "recurrence";
  j["epsilon"] = s.epsilon;
  j["sequence"] = sequence_j(seq, replay);
  j["certificate"] = certificate_j(cert, dyn);
  try {
    j["transitive_set"] = transitive_j(extract_transitive_set(seq, dyn, s.epsilon, -1, s.budgets.size_cap));
  } catch (const Error& e) {
    j["transitive_set"] = {{"error", e.what()}};
  }
  const auto per = detect_periodicity(x0, dyn, s.budgets.horizon);
  if (per) {
    j["periodicity"] = {{"period", per->period}, {"entry", per->entry}, {"cycle", states_j(per->cycle)}};
  } else {
    j["periodicity"] = nullptr;
  }
  return {"recurrence", dump(j), {{"certificate.csv", certificate_csv(cert)}, {"stages.csv", stages_csv(seq)}}};
}

J reversibility_j(const ReversibilityReport& r) {
  J j;
  j["epsilon"] = r.epsilon;
  j["resolution"] = r.resolution;
  j["operationally_reversible"] = r.operationally_reversible;
  j["arrow_of_time"] = r.arrow_of_time;
  J pairs = J::array();
  for (const auto& p : r.pairs) {
    J x;
    x["from"] = p.from;
    x["to"] = p.to;
    x["forward"] = opt_j(p.forward);
    x["backward"] = opt_j(p.backward);
    x["symmetric"] = p.symmetric;
    x["forward_path"] = p.forward_path;
    x["backward_path"] = p.backward_path;
    pairs.push_back(x);
  }
  j["pairs"] = pairs;
  return j;
}

std::string pairs_csv(const ReversibilityReport& r, const std::string& where) {
  std::ostringstream out;
  for (const auto& p : r.pairs)
    out << where << "," << p.from << "," << p.to << "," << (p.forward ? num(*p.forward) : "") << ","
        << (p.backward ? num(*p.backward) : "") << "," << p.symmetric << "\n";
  return out.str();
}

std::vector<std::pair<int, int>> all_ordered_pairs(int n) {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      if (i != k) out.emplace_back(i, k);
  return out;
}

CommandReport cmd_reversibility(const Scenario& s) {
  const RealizedDynamics dyn = s.dynamics();
  J phases = J::array();
  J j;
  j["command"] = "reversibility";
  j["epsilon"] = s.epsilon;
  std::string pairs_out = "where,from,to,forward,backward,symmetric\n";
  bool arrow = false;
  bool set_reversible = false;

  auto phase = [&](const std::string& name, const std::function<void()>& body) {
    J p;
    p["phase"] = name;
    try {
      body();
      p["complete"] = true;
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      p["complete"] = false;
      p["error"] = e.what();
    }
    phases.push_back(p);
    return p["complete"].get<bool>();
  };

  std::optional<StageSequence> seq;
  std::optional<RecurrenceCertificate> cert;
  std::string steered_file;
  std::optional<TransitiveSetApprox> set;

  if (s.has_net) {
    phase("net", [&] {
      std::vector<ProjectiveState> pinned = s.pinned;
      if (pinned.empty()) {
        if (s.x0) pinned.push_back(*s.x0);
        if (s.target) pinned.push_back(*s.target);
      }
      const StateNet net = StateNet::sample(dyn, s.net, pinned);
      const auto pairs = s.pairs.empty() ? all_ordered_pairs(net.pinned_count()) : s.pairs;
      for (const auto& [a, b] : pairs)
        if (a >= net.size() || b >= net.size()) throw InvalidArgument("pair index outside the net");
      SearchOptions so;
      so.max_hops = s.budgets.max_hops;
      so.cost_cap = s.epsilon;
      const ReversibilityReport r = reversibility_report(net, pairs, s.epsilon, so);
      j["net"] = net_j(net);
      j["net_reversibility"] = reversibility_j(r);
      arrow = arrow || r.arrow_of_time;
      pairs_out += pairs_csv(r, "net");
    });
  }

  const ProjectiveState& x0 = require_state(s.x0, "x0", "reversibility");
  phase("stages", [&] {
    seq = run_stages(x0, dyn, stage_budget(s), bucket_radius(s), s.recurrence.m_min);
    j["sequence"] = sequence_j(*seq, replay_orbit_stages(*seq, dyn));
  });
  if (seq) {
    phase("certificate", [&] {
      cert = certify_recurrence(*seq, dyn, s.scales, certify_options(s));
      j["certificate"] = certificate_j(*cert, dyn);
      if (!cert->complete) throw BudgetError("some scales have no loop within budget");
    });
    phase("transitive_set", [&] {
      set = extract_transitive_set(*seq, dyn, s.epsilon, -1, s.budgets.size_cap);
      j["transitive_set"] = transitive_j(*set);
    });
  }
  if (set) {
    phase("set_reversibility", [&] {
      const int n = static_cast<int>(set->members.size());
      if (n < 2) {
        const double loop = set->pairwise_costs(0, 0);
        set_reversible = loop < s.epsilon;
        j["set_reversibility"] = {{"epsilon", s.epsilon}, {"operationally_reversible", set_reversible},
                                  {"arrow_of_time", false}, {"pairs", J::array()}};
        return;
      }
      const StateNet net = StateNet::from_states(dyn, set->members, EdgeMode::Dense);
      SearchOptions so;
      so.cost_cap = s.epsilon;
      const ReversibilityReport r = reversibility_report(net, all_ordered_pairs(n), s.epsilon, so);
      set_reversible = r.operationally_reversible;
      arrow = arrow || r.arrow_of_time;
      j["set_reversibility"] = reversibility_j(r);
      pairs_out += pairs_csv(r, "set");
    });
  }
  if (cert) {
    phase("steered_run", [&] {
      const ScaleLoop* best = nullptr;
      for (const auto& l : cert->loops)
        if (l.found && l.chain->steps() >= 1) best = &l;
      if (!best) throw InfeasibleError("no certified loop to steer along");
      const SteeredRun run = steer_along_chain(*best->chain, dyn, steer_options(s));
      J r = steered_j(run, dyn);
      r["epsilon"] = best->epsilon;
      j["steered_run"] = r;
      steered_file = steered_csv(run);
    });
  }

  j["phases"] = phases;
  j["operationally_reversible_on_set"] = set_reversible;
  j["arrow_of_time"] = arrow;
  std::vector<Artifact> files{{"pairs.csv", pairs_out}};
  if (cert) files.push_back({"certificate.csv", certificate_csv(*cert)});
  if (!steered_file.empty()) files.push_back({"steered_run.csv", steered_file});
  return {"reversibility", dump(j), std::move(files)};
}

CommandReport cmd_grid(const Scenario& s) {
  const RealizedDynamics dyn = s.dynamics();
  const ProjectiveState& x0 = require_state(s.x0, "x0", "grid-diagnostic");
  const auto scales = grid_refinement_diagnostic(dyn, x0, s.grid_scales, s.budgets.grid_budget);

  std::ostringstream csv;
  csv << "k,epsilon,cell_size,first_visit,second_visit,nests_previous,cell\n";
  J rows = J::array();
  int breaks = 0;
  for (const auto& g : scales) {
    std::string cell;
    for (std::size_t i = 0; i < g.cell.size(); ++i) cell += (i ? ";" : "") + std::to_string(g.cell[i]);
    csv << g.k << "," << num(g.epsilon) << "," << num(g.cell_size) << "," << g.first_visit << "," << g.second_visit
        << "," << g.nests_previous << "," << cell << "\n";
    J x;
    x["k"] = g.k;
    x["epsilon"] = g.epsilon;
    x["cell_size"] = g.cell_size;
    x["cell"] = g.cell;
    x["first_visit"] = g.first_visit;
    x["second_visit"] = g.second_visit;
    x["nests_previous"] = g.nests_previous;
    rows.push_back(x);
    breaks += !g.nests_previous;
  }
  J j;
  j["command"] = "grid-diagnostic";
  j["budget"] = s.budgets.grid_budget;
  j["scales"] = rows;
  j["non_nesting_transitions"] = breaks;
  return {"grid-diagnostic", dump(j), {{"grid.csv", csv.str()}}};
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"simulate",   "steer",        "chain-search",
                                              "recurrence", "reversibility", "grid-diagnostic"};
  return names;
}

CommandReport run_command(const Scenario& scenario, const std::string& command) {
  if (command == "simulate") return cmd_simulate(scenario);
  if (command == "steer") return cmd_steer(scenario);
  if (command == "chain-search") return cmd_chain_search(scenario);
  if (command == "recurrence") return cmd_recurrence(scenario);
  if (command == "reversibility") return cmd_reversibility(scenario);
  if (command == "grid-diagnostic") return cmd_grid(scenario);
  throw ConfigError("unknown command \"" + command + "\"");
}

}  // namespace qbranch
