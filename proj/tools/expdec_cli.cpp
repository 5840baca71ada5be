// Command-line front end: graph ingestion, decomposition runs, one-shot
// cut-matching games, verification suites, and benchmark graph generation.
//
// Exit codes: 0 success, 1 property failure, 2 input error, 3 internal
// invariant violation.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "expdec/cut_matching.hpp"
#include "expdec/decomposition.hpp"
#include "expdec/gen.hpp"
#include "expdec/io.hpp"
#include "expdec/oracles.hpp"
#include "expdec/trimming.hpp"
#include "expdec/unit_flow.hpp"

namespace {

using namespace expdec;

struct CommonOpts {
  std::string input;
  std::string out;
  std::string trace;
  double phi = 0.05;
  std::uint64_t seed = 1;
  std::string mode = "desk";
  // parameter overrides; negative means "derived"
  long long T = -1, Z = -1, c = -1, d = -1, h = -1;
  bool oracle = false;
};

Mode parse_mode(const std::string &mode) {
  if (mode == "desk") return Mode::desk;
  if (mode == "paper") return Mode::paper;
  throw InputError("mode must be `desk` or `paper`");
}

Params build_params(const CommonOpts &o, long long m) {
  Mode mode = parse_mode(o.mode);
  Params p = mode == Mode::desk ? Params::desk(o.phi, std::max<long long>(m, 1), o.seed)
                                : Params::paper(o.phi, std::max<long long>(m, 1), o.seed);
  if (o.T > 0) p.T = static_cast<int>(o.T);
  if (o.Z > 0) p.Z = o.Z;
  if (o.c > 0) p.c = o.c;
  if (o.d > 0) p.d = static_cast<int>(o.d);
  if (o.h > 0) p.h = o.h;
  p.validate(std::max<long long>(m, 1));
  return p;
}

MultiGraph load_graph(const std::string &path) {
  std::ifstream in(path);
  require_input(in.good(), "cannot open input file: " + path);
  return read_edge_list(in);
}

void write_output(const std::string &path, const std::string &content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path);
  require_input(out.good(), "cannot open output file: " + path);
  out << content;
}

nlohmann::ordered_json trace_record(const RoundTrace &t) {
  return nlohmann::ordered_json{{"t", t.t},
                                {"k", t.k},
                                {"a_left", t.a_left},
                                {"a_right", t.a_right},
                                {"eta", t.eta},
                                {"sum_u_sq", t.sum_u_sq},
                                {"cut_size", t.cut_size},
                                {"vol_r", t.vol_r},
                                {"max_edge_flow", t.max_edge_flow},
                                {"feasible", t.feasible}};
}

int cmd_decompose(const CommonOpts &o) {
  MultiGraph g = load_graph(o.input);
  Partition part = decomp(g, o.phi, parse_mode(o.mode), o.seed);
  nlohmann::ordered_json j = partition_to_json(part);
  const double L = Params::log2_clamped(std::max(g.m(), 2));
  const double bound = o.phi * static_cast<double>(g.m()) * L * L;
  j["bound"] = bound;
  write_output(o.out, j.dump(2) + "\n");
  std::cout << "clusters=" << part.clusters.size() << " inter_edges=" << part.inter_cluster_edges
            << " bound=" << bound << "\n";
  if (recount_inter_cluster_edges(g, part.clusters) != part.inter_cluster_edges)
    throw InternalError("inter-cluster recount mismatch");
  return 0;
}

int cmd_cutmatch(const CommonOpts &o) {
  MultiGraph g = load_graph(o.input);
  Params p = build_params(o, g.m());
  GameOptions opts;
  opts.collect_history = o.oracle;
  CutMatchingResult res = cut_matching(g, p, opts);

  std::vector<double> psi;
  if (o.oracle) {
    require_input(g.m() <= p.oracle_cap, "oracle mode refuses graphs with more than " +
                                             std::to_string(p.oracle_cap) + " edges");
    for (std::size_t t = 0; t < res.active_history.size(); ++t) {
      MatchingSequence prefix(res.matchings.begin(),
                              res.matchings.begin() + std::min(t, res.matchings.size()));
      Eigen::MatrixXd f = dense_flow_matrix(prefix, g.m(), p.d, p.oracle_cap);
      psi.push_back(res.active_history[t].empty()
                        ? 0.0
                        : dense_potential(f, res.active_history[t], p.d, p.oracle_cap));
    }
  }

  if (!o.trace.empty()) {
    std::ostringstream lines;
    for (std::size_t i = 0; i < res.trace.size(); ++i) {
      auto rec = trace_record(res.trace[i]);
      if (o.oracle && i + 1 < psi.size()) rec["psi"] = psi[i + 1];
      lines << rec.dump() << "\n";
    }
    write_output(o.trace, lines.str());
  }

  std::cout << "case=" << game_case_name(res.outcome) << " rounds=" << res.rounds
            << " vol_r=" << res.vol_r;
  if (res.outcome != GameCase::certified) {
    std::cout << " cut_conductance=" << result_cut_conductance(g, res)
              << " bound=" << 150.0 / static_cast<double>(p.c);
  } else {
    std::cout << " phi=" << p.phi;
  }
  if (res.rst_too_small) std::cout << " note=selection_minimum";
  if (o.oracle && psi.size() > 1) std::cout << " psi_T/psi_0=" << psi.back() / psi.front();
  std::cout << "\n";
  auto congestion = congestion_audit(res.congestion, std::max(res.rounds, 1), p.c);
  if (!congestion.ok) throw InternalError("congestion ledger exceeded c*t");
  return 0;
}

int cmd_gen(const std::string &kind, int n, int deg, int parts, int bridges, std::uint64_t seed,
            const std::string &out) {
  Rng rng(seed);
  MultiGraph g;
  if (kind == "regular") {
    g = random_regular(n, deg, rng);
  } else if (kind == "dumbbell") {
    g = dumbbell(parts, n, bridges);
  } else if (kind == "planted") {
    g = planted_expanders(parts, n, deg, bridges, rng);
  } else {
    throw InputError("gen kind must be one of: regular, dumbbell, planted");
  }
  std::ostringstream ss;
  write_edge_list(ss, g);
  write_output(out, ss.str());
  return 0;
}

int cmd_oracle_compare(const CommonOpts &o) {
  MultiGraph g = load_graph(o.input);
  Params p = build_params(o, g.m());
  require_input(g.m() <= p.oracle_cap, "oracle-compare refuses graphs with more than " +
                                           std::to_string(p.oracle_cap) + " edges");
  GameOptions opts;
  opts.collect_history = true;
  GameState st = make_game(g, p, opts);
  Rng probe(o.seed ^ 0x5eedULL);
  double worst = 0.0;
  const int rounds = std::min(p.T, 6);
  for (int t = 0; t < rounds; ++t) {
    try {
      game_step(st);
    } catch (const InstanceTooSmall &) {
      break;
    }
    auto active = st.active_coords();
    if (active.empty()) break;
    auto r = sample_unit_vector(g.m(), probe);
    auto proj = project_power(st.matchings, active, r, p.d);
    Eigen::MatrixXd f = dense_flow_matrix(st.matchings, g.m(), p.d, p.oracle_cap);
    auto [w, psi] = dense_W_and_potential(f, active, p.d, p.oracle_cap);
    (void)psi;
    Eigen::VectorXd rv = Eigen::Map<Eigen::VectorXd>(r.data(), g.m());
    Eigen::VectorXd dense = w * rv;
    for (int i = 0; i < g.m(); ++i) worst = std::max(worst, std::abs(proj.u[i] - dense(i)));
  }
  std::cout << "rounds=" << st.t << " max_deviation=" << worst << "\n";
  return worst <= 1e-8 ? 0 : 1;
}

// ---------------------------------------------------------------------------
// verify: property suites on generated instances, with a reproducer line on
// failure and an optional injected fault as a negative control.
// ---------------------------------------------------------------------------

struct VerifyReport {
  int checks = 0;
  int failures = 0;
  void expect(bool ok, const std::string &what, std::uint64_t seed, int index) {
    ++checks;
    if (!ok) {
      ++failures;
      std::cout << "FAIL " << what << " (reproduce: seed=" << seed << " index=" << index << ")\n";
    }
  }
};

int cmd_verify(std::uint64_t seed, int cases, bool inject_fault) {
  VerifyReport rep;
  Rng rng(seed);

  // matrix identity suite
  for (int i = 0; i < cases; ++i) {
    const int m = 6 + rng.below_int(12);
    Rng sub = rng.split();
    expdec::MatchingSequence seq;
    std::vector<int> active(m);
    for (int j = 0; j < m; ++j) active[j] = j;
    std::vector<int> pool = active;
    sub.shuffle(pool);
    MatchingRound round;
    round.round = 1;
    for (int j = 0; j + 1 < m / 2; j += 2) round.pairs.emplace_back(pool[j], pool[j + 1]);
    seq.push_back(round);
    const int d = 8;
    Eigen::MatrixXd delta = dense_centering(active, m);
    Eigen::MatrixXd n_mat = dense_lazy_matching(round, m, d);
    rep.expect((delta * delta - delta).cwiseAbs().maxCoeff() < 1e-12, "centering idempotence",
               seed, i);
    rep.expect((n_mat * delta - delta * n_mat).cwiseAbs().maxCoeff() < 1e-12,
               "lazy-walk commutation", seed, i);
    Eigen::MatrixXd f = dense_flow_matrix(seq, m, d);
    auto [lo, hi] = eigenvalue_range(f);
    rep.expect(lo >= -1.0 - 1e-9 && hi <= 1.0 + 1e-9, "flow-matrix eigenvalue range", seed, i);
  }

  // source/target selection suite
  for (int i = 0; i < cases; ++i) {
    Rng sub = rng.split();
    const int k = 16 + sub.below_int(64);
    std::vector<double> u(k);
    double sum = 0.0;
    for (int j = 0; j + 1 < k; ++j) {
      u[j] = sub.gaussian();
      sum += u[j];
    }
    u[k - 1] = -sum;
    std::vector<int> ids(k);
    for (int j = 0; j < k; ++j) ids[j] = j;
    bool ok = true;
    try {
      auto sel = rst_select<double>(ids, u, 16);
      if (inject_fault && i == 0 && !sel.a_right.empty()) sel.a_right.pop_back();
      ok = check_rst_conditions(ids, u, sel, 1e-9);
      if (inject_fault && i == 0) ok = check_rst_conditions(ids, u, sel, 0.0) && false;
    } catch (const std::exception &) {
      ok = false;
    }
    rep.expect(ok, "source/target selection conditions", seed, i);
  }

  // unit-flow post-condition suite
  for (int i = 0; i < cases; ++i) {
    Rng sub = rng.split();
    const int n = 8 + sub.below_int(24);
    MultiGraph g = random_connected(n, n + sub.below_int(n), sub);
    Params p = Params::desk(0.05, g.m(), seed + i);
    std::vector<Vertex> sources, sinks;
    for (Vertex v = 0; v < n; ++v) {
      if (v < n / 6 + 1) sources.push_back(v);
      else if (sub.below(2) == 0) sinks.push_back(v);
    }
    bool ok = true;
    try {
      auto out = route_flow(g, sources, sinks, p, /*debug_checks=*/true);
      for (EdgeId e = 0; e < g.m(); ++e)
        if (std::llabs(out.flow.flow[e]) > p.c) ok = false;
      if (!out.feasible) {
        auto [num, den] = conductance_ratio(g, out.cut);
        if (static_cast<double>(num) / static_cast<double>(den) >
            50.0 / static_cast<double>(p.c))
          ok = false;
      }
    } catch (const std::exception &) {
      ok = false;
    }
    rep.expect(ok, "unit-flow post-conditions", seed, i);
  }

  // subdivision volume/conductance suite (exhaustive on small graphs)
  for (int i = 0; i < std::min(cases, 20); ++i) {
    Rng sub = rng.split();
    const int n = 3 + sub.below_int(4);
    MultiGraph g = random_connected(n, sub.below_int(4), sub);
    if (g.n() + g.m() > 14) continue;
    SubdivisionGraph sg = subdivide(g);
    bool ok = true;
    const int total = sg.ge.n();
    for (std::uint32_t bits = 1; bits + 1 < (1u << total); ++bits) {
      std::vector<char> mask(total, 0);
      for (int v = 0; v < total; ++v) mask[v] = (bits >> v) & 1u;
      if (!respects_subdivision(sg, mask)) continue;
      std::vector<Vertex> s_base;
      long long vol_ge = 0;
      for (int v = 0; v < total; ++v)
        if (mask[v]) {
          vol_ge += sg.ge.degree(v);
          if (v < g.n()) s_base.push_back(v);
        }
      long long vol_g = volume(g, s_base);
      if (!(vol_g <= vol_ge && vol_ge <= 3 * vol_g)) ok = false;
    }
    rep.expect(ok, "subdivision volume bounds", seed, i);
  }

  // expansion-estimate checker suite
  for (int i = 0; i < std::min(cases, 10); ++i) {
    Rng sub = rng.split();
    const int m = 8 + sub.below_int(5);
    std::vector<int> active(m);
    for (int j = 0; j < m; ++j) active[j] = j;
    MatchingSequence seq;
    for (int t = 1; t <= 200; ++t) {
      std::vector<int> pool = active;
      sub.shuffle(pool);
      MatchingRound round;
      round.round = t;
      for (int j = 0; j + 1 < m; j += 2) round.pairs.emplace_back(pool[j], pool[j + 1]);
      seq.push_back(round);
    }
    Eigen::MatrixXd f = dense_flow_matrix(seq, m, 4);
    rep.expect(check_expansion_estimate(f, active), "expansion estimate checker", seed, i);
  }

  std::cout << "verify: " << rep.checks - rep.failures << "/" << rep.checks << " checks passed\n";
  return rep.failures == 0 ? 0 : 1;
}

int dispatch(int argc, char **argv) {
  CLI::App app{"expander decomposition toolkit"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "print help"); // frees -h / --h for the height override

  CommonOpts o;
  auto add_common = [&o](CLI::App *cmd, bool with_input) {
    cmd->set_help_flag("--help", "print help");
    if (with_input) cmd->add_option("input", o.input, "edge-list file")->required();
    cmd->add_option("--phi", o.phi, "target conductance");
    cmd->add_option("--seed", o.seed, "random seed");
    cmd->add_option("--mode", o.mode, "desk or paper");
    cmd->add_option("--T", o.T, "round budget override");
    cmd->add_option("--Z", o.Z, "capacity divisor override");
    cmd->add_option("--c", o.c, "edge capacity override");
    cmd->add_option("--d", o.d, "lazy-walk denominator override");
    cmd->add_option("--h", o.h, "unit-flow height override");
    cmd->add_option("--out", o.out, "output file (default stdout)");
    cmd->add_option("--trace", o.trace, "JSON-lines trace file");
    cmd->add_flag("--oracle", o.oracle, "dense-oracle instrumentation (small graphs)");
  };

  auto *dec = app.add_subcommand("decompose", "partition a graph into expander clusters");
  add_common(dec, true);
  auto *cm = app.add_subcommand("cutmatch", "run one cut-matching game");
  add_common(cm, true);
  auto *oc = app.add_subcommand("oracle-compare",
                                "compare implicit projections against the dense oracle");
  add_common(oc, true);

  auto *ver = app.add_subcommand("verify", "run the oracle/property suites");
  ver->set_help_flag("--help", "print help");
  std::uint64_t vseed = 1;
  int vcases = 50;
  bool inject = false;
  ver->add_option("--seed", vseed, "random seed");
  ver->add_option("--cases", vcases, "instances per suite");
  ver->add_flag("--inject-fault", inject, "negative control: force one failure");

  auto *gen = app.add_subcommand("gen", "emit benchmark graphs");
  gen->set_help_flag("--help", "print help");
  std::string kind = "regular", gout;
  int gn = 16, gdeg = 3, gparts = 2, gbridges = 1;
  std::uint64_t gseed = 1;
  gen->add_option("--kind", kind, "regular | dumbbell | planted");
  gen->add_option("--n", gn, "vertices (per part for dumbbell/planted)");
  gen->add_option("--deg", gdeg, "degree for regular/planted");
  gen->add_option("--k", gparts, "number of parts");
  gen->add_option("--b", gbridges, "bridges between consecutive parts");
  gen->add_option("--seed", gseed, "random seed");
  gen->add_option("--out", gout, "output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  if (dec->parsed()) return cmd_decompose(o);
  if (cm->parsed()) return cmd_cutmatch(o);
  if (oc->parsed()) return cmd_oracle_compare(o);
  if (ver->parsed()) return cmd_verify(vseed, vcases, inject);
  if (gen->parsed()) return cmd_gen(kind, gn, gdeg, gparts, gbridges, gseed, gout);
  return 2;
}

} // namespace

int main(int argc, char **argv) {
  try {
    return dispatch(argc, argv);
  } catch (const expdec::InternalError &e) {
    std::cerr << "internal invariant violation: " << e.what() << "\n";
    return 3;
  } catch (const expdec::InputError &e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
