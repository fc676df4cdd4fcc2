// Copyright 2026 The cfmaps Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cfmaps_cli/commands.hpp"

#include "cfmaps_cli/dataset.hpp"
#include "cfmaps_cli/worker_pool.hpp"

#include <cfmaps/basis_cache.hpp>
#include <cfmaps/conversion.hpp>
#include <cfmaps/errors.hpp>
#include <cfmaps/fmaps.hpp>
#include <cfmaps/matrix_io.hpp>
#include <cfmaps/mesh_io.hpp>
#include <cfmaps/qmaps.hpp>
#include <cfmaps/refinement.hpp>
#include <cfmaps/shapes.hpp>
#include <cfmaps/transfer.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <ostream>

namespace cfmaps::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

TriMesh load_mesh_checked(const fs::path& path) {
  if (path.empty()) throw ConfigError("a mesh path is required");
  if (!fs::exists(path)) throw DataError("mesh file not found: " + path.string());
  return load_mesh(path);
}

BasisBundle truncate(const BasisBundle& b, int k, int kc) {
  return {b.real.truncated(k), b.complex.truncated(kc)};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

void save_map(RunDirectory& run, const std::string& name, const PointMap& map) {
  save_pointmap(run.file(name), map);
  run.add_output(name);
}

template <class M>
void save_matrix(RunDirectory& run, const std::string& name, const M& m) {
  save_matrix_csv(run.file(name), m);
  run.add_output(name);
}

void write_accuracy(RunDirectory& run, const std::vector<AccuracyRun>& runs, std::ostream& out) {
  {
    std::ofstream csv(run.file("accuracy.csv"));
    write_accuracy_csv(csv, runs);
  }
  {
    std::ofstream md(run.file("accuracy.md"));
    write_accuracy_markdown(md, runs);
  }
  run.add_output("accuracy.csv");
  run.add_output("accuracy.md");
  write_accuracy_markdown(out, runs);
}

json report_json(const GeodesicErrorReport& r) {
  const auto infinite = std::count_if(r.errors.begin(), r.errors.end(),
                                      [](double e) { return !std::isfinite(e); });
  auto num = [](double v) { return std::isfinite(v) ? json(v) : json("inf"); };
  return {{"vertices", r.errors.size()}, {"mean", num(r.mean)},     {"median", num(r.median)},
          {"min", num(r.min)},           {"max", num(r.max)},       {"unreachable", infinite}};
}

void write_curves(const fs::path& path,
                  const std::vector<std::tuple<std::string, std::string, GeodesicErrorReport>>& rs) {
  std::ofstream out(path);
  out.precision(10);
  out << "pair,method,threshold,coverage\n";
  for (const auto& [pair, method, r] : rs) {
    for (std::size_t i = 0; i < r.thresholds.size(); ++i) {
      out << pair << ',' << method << ',' << r.thresholds[i] << ',' << r.curve[i] << '\n';
    }
  }
}

fs::path cache_directory(const RunConfig& config) {
  return config.cache_dir.empty() ? BasisCache::default_directory() : config.cache_dir;
}

}  // namespace

std::string pair_name(const RunConfig& config) {
  if (!config.name.empty()) return config.name;
  if (config.source.empty()) return config.target.stem().string();
  return config.source.stem().string() + "-" + config.target.stem().string();
}

ShapeData load_shape(const fs::path& path, int k, int k_complex, const RunConfig& config,
                     RunDirectory* run, bool* cache_hit) {
  TriMesh mesh = load_mesh_checked(path);
  if (run) run->add_input("mesh", path);
  const int kmax = std::max(k, k_complex);
  if (kmax > mesh.num_vertices()) {
    throw ConfigError("requested " + std::to_string(kmax) + " eigenpairs but " + path.string() +
                      " has " + std::to_string(mesh.num_vertices()) + " vertices");
  }
  BasisBundle bundle;
  if (config.no_cache) {
    bundle = compute_basis_bundle(mesh, kmax);
    if (cache_hit) *cache_hit = false;
  } else {
    bundle = BasisCache(cache_directory(config)).get(mesh, kmax, cache_hit);
  }
  return make_shape_data(mesh, truncate(bundle, k, k_complex));
}

PointMap load_checked_map(const fs::path& path, int source_size, int target_size,
                          RunDirectory* run, const std::string& role) {
  if (!fs::exists(path)) throw DataError(role + " file not found: " + path.string());
  PointMap map;
  try {
    map = load_pointmap(path);
  } catch (const Error& e) {
    throw DataError(role + ": " + e.what());
  }
  if (static_cast<int>(map.size()) != source_size) {
    throw DataError(role + " has " + std::to_string(map.size()) + " entries, expected " +
                    std::to_string(source_size));
  }
  for (int v : map) {
    if (v < 0 || v >= target_size) throw DataError(role + " references vertex " + std::to_string(v));
  }
  if (run) run->add_input(role, path);
  return map;
}

MatchOutput match_pipeline(const ShapeData& source, const ShapeData& target,
                           const RunConfig& config) {
  const WksOptions wks{config.descriptor_count, config.descriptor_variance};
  const DescriptorSet ds = wks_descriptors(source.basis, wks);
  const DescriptorSet dt = wks_descriptors(target.basis, wks);
  FmapWeights weights;
  weights.descriptor = config.weight_descriptor;
  weights.commutativity = config.weight_commutativity;
  weights.laplacian = config.weight_laplacian;
  MatchOutput out;
  out.C = fmap_from_descriptors(ds, dt, source.basis, target.basis, weights);
  if (config.icp_iterations > 0) {
    out.C = icp_refine(out.C, source.basis, target.basis, config.icp_iterations).C;
  }
  out.Q = config.q_solver == "lsq" ? estimate_q_lsq(out.C, source, target)
                                   : estimate_q_procrustes(out.C, source, target);
  out.map_fmap = pointmap_from_fmap(out.C, source.basis, target.basis);
  out.map_q = pointmap_from_q(out.Q, source, target);
  return out;
}

void cmd_basis(const RunConfig& config, RunDirectory& run, const Invocation& io) {
  const fs::path path = config.mesh.empty() ? config.source : config.mesh;
  const TriMesh mesh = load_mesh_checked(path);
  run.add_input("mesh", path);
  const int k = std::max(config.k, effective_k_complex(config));
  if (k > mesh.num_vertices()) throw ConfigError("k exceeds the vertex count");
  bool hit = false;
  BasisBundle bundle;
  fs::path cache_file;
  if (config.no_cache) {
    bundle = compute_basis_bundle(mesh, k);
  } else {
    BasisCache cache(cache_directory(config));
    bundle = cache.get(mesh, k, &hit);
    cache_file = cache.path_for(mesh_content_hash(mesh));
  }
  {
    std::ofstream out(run.file("eigenvalues.csv"));
    out.precision(17);
    out << "index,real,complex\n";
    for (int i = 0; i < k; ++i) {
      out << i << ',' << bundle.real.lambda[i] << ',' << bundle.complex.lambda[i] << '\n';
    }
  }
  run.add_output("eigenvalues.csv");
  io.out << (config.no_cache ? "cache disabled" : hit ? "cache hit" : "cache miss");
  if (!cache_file.empty()) io.out << ": " << cache_file.string();
  io.out << '\n';
}

void cmd_match(const RunConfig& config, RunDirectory& run, const Invocation& io) {
  const int kc = effective_k_complex(config);
  const ShapeData M = load_shape(config.source, config.k, kc, config, &run);
  const ShapeData N = load_shape(config.target, config.k, kc, config, &run);
  const MatchOutput m = match_pipeline(M, N, config);
  save_matrix(run, "C.csv", m.C);
  save_matrix(run, "Q.csv", m.Q);
  save_map(run, "map_fmap.map", m.map_fmap);
  save_map(run, "map_q.map", m.map_q);
  if (!config.ground_truth.empty()) {
    const PointMap gt = load_checked_map(config.ground_truth, M.num_vertices(), N.num_vertices(),
                                         &run, "ground_truth");
    const GeodesicGraph graph(N.mesh);
    const std::string name = pair_name(config);
    const auto rf = geodesic_error(m.map_fmap, gt, N.mesh, graph);
    const auto rq = geodesic_error(m.map_q, gt, N.mesh, graph);
    write_accuracy(run, {make_run(name, "fmap", rf), make_run(name, "fmap+Q", rq)}, io.out);
  } else {
    io.out << "wrote C, Q and point maps\n";
  }
}

void cmd_refine(const RunConfig& config, RunDirectory& run, const Invocation& io) {
  const auto algo = parse_refinement_algorithm(config.algo);
  if (!algo) throw ConfigError("unknown algorithm '" + config.algo + "'");
  const auto& s = config.schedule;
  const ShapeData M = load_shape(config.source, s.k_end, s.k_end, config, &run);
  const ShapeData N = load_shape(config.target, s.k_end, s.k_end, config, &run);
  const RefinementSchedule schedule = RefinementSchedule::range(s.k_start, s.k_end, s.step, s.inner);
  const PointMap init =
      config.initial_map.empty()
          ? random_initial_map(M, N, s.k_start, config.seed)
          : load_checked_map(config.initial_map, M.num_vertices(), N.num_vertices(), &run,
                             "initial_map");
  RefinementOptions options;
  options.use_q_step = config.use_q_step;
  const RefinementResult result = refine(*algo, init, nullptr, M, N, schedule, options);
  save_map(run, "map_mn.map", result.map_mn);
  if (!result.map_nm.empty()) save_map(run, "map_nm.map", result.map_nm);

  json log;
  log["algo"] = to_string(*algo);
  log["use_q_step"] = config.use_q_step;
  log["seed"] = config.seed;
  log["schedule"] = {{"k_start", s.k_start}, {"k_end", s.k_end}, {"step", s.step}, {"inner", s.inner}};
  log["initialization"] = config.initial_map.empty() ? "random" : config.initial_map.string();
  log["steps"] = json::array();
  for (const auto& e : result.log) {
    log["steps"].push_back({{"k", e.k}, {"inner", e.inner}, {"residual", e.residual}});
  }
  std::string method = to_string(*algo) + (config.use_q_step ? "" : "-noQ");
  if (!config.ground_truth.empty()) {
    const PointMap gt = load_checked_map(config.ground_truth, M.num_vertices(), N.num_vertices(),
                                         &run, "ground_truth");
    const auto report = geodesic_error(result.map_mn, gt, N.mesh);
    log["geodesic_error"] = report_json(report);
    write_accuracy(run, {make_run(pair_name(config), method, report)}, io.out);
  }
  write_text(run.file("refine_log.json"), log.dump(2) + "\n");
  run.add_output("refine_log.json");
  io.out << method << ": " << result.log.size() << " steps";
  if (!result.log.empty()) io.out << ", final residual " << result.log.back().residual;
  io.out << '\n';
}

void cmd_transfer(const RunConfig& config, RunDirectory& run, const Invocation& io) {
  std::vector<int> ks = config.transfer.k_values;
  if (ks.empty()) ks = {config.k};
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  const int kmax = ks.back();
  const ShapeData P = load_shape(config.source, kmax, kmax, config, &run);
  const ShapeData R = load_shape(config.target, kmax, kmax, config, &run);
  if (config.ground_truth.empty()) throw ConfigError("transfer needs a ground_truth map");
  const PointMap gt = load_checked_map(config.ground_truth, P.num_vertices(), R.num_vertices(),
                                       &run, "ground_truth");
  const bool wants_symmetric =
      std::find(config.transfer.noise_kinds.begin(), config.transfer.noise_kinds.end(),
                "symmetric") != config.transfer.noise_kinds.end();
  PointMap sym_map;
  if (wants_symmetric) {
    if (config.symmetry.empty()) throw ConfigError("symmetric noise needs a symmetry map");
    const PointMap sym = load_checked_map(config.symmetry, R.num_vertices(), R.num_vertices(),
                                          &run, "symmetry");
    sym_map.resize(gt.size());
    for (std::size_t i = 0; i < gt.size(); ++i) sym_map[i] = sym[gt[i]];
  }

  VectorXc X;
  const std::string& field = config.transfer.field;
  if (field == "random") {
    X = random_smooth_field(R.complex_basis, config.seed);
  } else {
    X = coordinate_gradient_field(R, field.back() - 'x');
  }
  const VectorXc Y_gt = pushforward_field(q_closed_form(gt, P, R).q, gt, X);

  const std::string name = pair_name(config);
  std::vector<std::vector<TransferRecord>> per_k(ks.size());
  WorkerPool pool(std::min<int>(effective_threads(config), static_cast<int>(ks.size())));
  for (std::size_t ki = 0; ki < ks.size(); ++ki) {
    pool.submit([&, ki] {
      const int k = ks[ki];
      const ShapeData Pk = make_shape_data(P.mesh, BasisBundle{P.basis.truncated(k),
                                                               P.complex_basis.truncated(k)});
      const ShapeData Rk = make_shape_data(R.mesh, BasisBundle{R.basis.truncated(k),
                                                               R.complex_basis.truncated(k)});
      const MatrixXd C_gt = fmap_from_pointmap(gt, Pk.basis, Rk.basis);
      MatrixXd C_sym;
      if (!sym_map.empty()) C_sym = fmap_from_pointmap(sym_map, Pk.basis, Rk.basis);
      for (const auto& kind_name : config.transfer.noise_kinds) {
        const NoiseKind kind = *parse_noise_kind(kind_name);
        std::vector<double> levels = config.transfer.levels;
        if (kind == NoiseKind::none) levels = {0.0};
        for (double level : levels) {
          const MatrixXd C = make_noisy_fmap(C_gt, {kind, level, config.seed},
                                             C_sym.size() ? &C_sym : nullptr);
          for (const auto& method : config.transfer.methods) {
            VectorXc Y;
            if (method == "complex") {
              const MatrixXc Q = config.q_solver == "lsq" ? estimate_q_lsq(C, Pk, Rk)
                                                          : estimate_q_procrustes(C, Pk, Rk);
              Y = transfer_complex(Q, X, Pk, Rk);
            } else if (method == "hodge") {
              Y = transfer_hodge(C, X, Pk, Rk);
            } else {
              Y = transfer_operator_lsq(C, X, Pk, Rk);
            }
            per_k[ki].push_back({name, method, kind_name, level, k,
                                 transfer_error(Y, Y_gt, X, P.mass.diag, R.mass.diag)});
          }
        }
      }
    });
  }
  pool.wait();
  std::vector<TransferRecord> records;
  for (auto& v : per_k) records.insert(records.end(), v.begin(), v.end());
  {
    std::ofstream out(run.file("transfer.csv"));
    write_transfer_csv(out, records);
  }
  run.add_output("transfer.csv");
  write_transfer_csv(io.out, records);
}

void cmd_eval(const RunConfig& config, RunDirectory& run, const Invocation& io) {
  using Curve = std::tuple<std::string, std::string, GeodesicErrorReport>;
  if (!config.dataset.empty()) {
    const DatasetManifest manifest = load_dataset_manifest(config.dataset);
    run.add_input("dataset", config.dataset);
    const int kc = effective_k_complex(config);
    std::vector<std::vector<AccuracyRun>> runs(manifest.pairs.size());
    std::vector<std::vector<Curve>> curves(manifest.pairs.size());
    std::vector<json> flips(manifest.pairs.size());
    WorkerPool pool(effective_threads(config));
    for (std::size_t i = 0; i < manifest.pairs.size(); ++i) {
      pool.submit([&, i] {
        const DatasetPair& p = manifest.pairs[i];
        const ShapeData M = load_shape(p.source, config.k, kc, config, &run);
        const ShapeData N = load_shape(p.target, config.k, kc, config, &run);
        const PointMap gt =
            load_checked_map(p.ground_truth, M.num_vertices(), N.num_vertices(), &run,
                             "ground_truth");
        const MatchOutput m = match_pipeline(M, N, config);
        const GeodesicGraph graph(N.mesh);
        const auto rf = geodesic_error(m.map_fmap, gt, N.mesh, graph);
        const auto rq = geodesic_error(m.map_q, gt, N.mesh, graph);
        runs[i] = {make_run(p.name, "fmap", rf), make_run(p.name, "fmap+Q", rq)};
        curves[i] = {{p.name, "fmap", rf}, {p.name, "fmap+Q", rq}};
        save_pointmap(run.file(p.name + "_fmap.map"), m.map_fmap);
        save_pointmap(run.file(p.name + "_q.map"), m.map_q);
        run.add_output(p.name + "_fmap.map");
        run.add_output(p.name + "_q.map");
        if (!p.symmetry.empty()) {
          const PointMap sym = load_checked_map(p.symmetry, N.num_vertices(), N.num_vertices(),
                                                &run, "symmetry");
          flips[i] = {{"pair", p.name},
                      {"fmap", flip_rate(m.map_fmap, gt, sym, graph)},
                      {"fmap+Q", flip_rate(m.map_q, gt, sym, graph)}};
        }
      });
    }
    pool.wait();
    std::vector<AccuracyRun> all;
    std::vector<Curve> all_curves;
    json flip_list = json::array();
    for (std::size_t i = 0; i < runs.size(); ++i) {
      all.insert(all.end(), runs[i].begin(), runs[i].end());
      all_curves.insert(all_curves.end(), curves[i].begin(), curves[i].end());
      if (!flips[i].is_null()) flip_list.push_back(flips[i]);
    }
    write_curves(run.file("curves.csv"), all_curves);
    run.add_output("curves.csv");
    if (!flip_list.empty()) {
      write_text(run.file("flip_rates.json"), flip_list.dump(2) + "\n");
      run.add_output("flip_rates.json");
    }
    write_accuracy(run, all, io.out);
    return;
  }

  if (config.map.empty() || config.ground_truth.empty() || config.target.empty()) {
    throw ConfigError("eval needs --dataset, or --map, --ground-truth and --target");
  }
  const TriMesh N = load_mesh_checked(config.target);
  run.add_input("target", config.target);
  PointMap map;
  try {
    map = load_pointmap(config.map);
  } catch (const Error& e) {
    throw DataError(std::string("map: ") + e.what());
  }
  const int n_source = static_cast<int>(map.size());
  map = load_checked_map(config.map, n_source, N.num_vertices(), &run, "map");
  const PointMap gt =
      load_checked_map(config.ground_truth, n_source, N.num_vertices(), &run, "ground_truth");
  const GeodesicGraph graph(N);
  const auto report = geodesic_error(map, gt, N, graph);
  json summary = report_json(report);
  if (!config.symmetry.empty()) {
    const PointMap sym =
        load_checked_map(config.symmetry, N.num_vertices(), N.num_vertices(), &run, "symmetry");
    summary["flip_rate"] = flip_rate(map, gt, sym, graph);
  }
  write_text(run.file("report.json"), summary.dump(2) + "\n");
  run.add_output("report.json");
  write_curves(run.file("curves.csv"), {{pair_name(config), "map", report}});
  run.add_output("curves.csv");
  {
    std::ofstream out(run.file("errors.csv"));
    out.precision(17);
    out << "vertex,error\n";
    for (std::size_t i = 0; i < report.errors.size(); ++i) out << i << ',' << report.errors[i] << '\n';
  }
  run.add_output("errors.csv");
  io.out << summary.dump(2) << '\n';
}

void cmd_synth(const RunConfig& config, RunDirectory& run, const Invocation& io) {
  TriMesh source;
  std::vector<int> reflection;
  if (config.shape == "sphere") {
    source = shapes::icosphere(config.level);
  } else if (config.shape == "bumpy") {
    source = shapes::bumpy_sphere(config.level, config.seed);
  } else {
    auto blob = shapes::bilateral_blob(config.level, config.seed);
    source = std::move(blob.mesh);
    reflection = std::move(blob.reflection);
  }
  // The target keeps the canonical pose (mirror plane x = 0 for the blob); the
  // source is a rotated, re-indexed copy.
  const auto copy = shapes::rigid_copy(source, config.seed + 1);
  save_off(copy.mesh, run.file("source.off"));
  save_off(source, run.file("target.off"));
  save_pointmap(run.file("ground_truth.map"), copy.to_source);
  run.add_output("source.off");
  run.add_output("target.off");
  run.add_output("ground_truth.map");
  DatasetPair pair{config.shape, run.file("source.off"), run.file("target.off"),
                   run.file("ground_truth.map"), {}};
  if (!reflection.empty()) {
    save_pointmap(run.file("symmetry.map"), reflection);
    run.add_output("symmetry.map");
    pair.symmetry = run.file("symmetry.map");
  }
  save_dataset_manifest(run.file("dataset.json"), {"synthetic", {pair}});
  run.add_output("dataset.json");
  io.out << "wrote " << config.shape << " pair with " << source.num_vertices()
         << " vertices to " << run.path().string() << '\n';
}

}  // namespace cfmaps::cli
