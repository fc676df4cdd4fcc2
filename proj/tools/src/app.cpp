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

#include <cfmaps/eigensolver.hpp>
#include <cfmaps/errors.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <functional>
#include <mutex>
#include <ostream>

namespace cfmaps::cli {

namespace fs = std::filesystem;

namespace {

using Command = void (*)(const RunConfig&, RunDirectory&, const Invocation&);

template <class T>
constexpr bool is_vector = false;
template <class T>
constexpr bool is_vector<std::vector<T>> = true;

/// Binds a flag to a scratch config and copies it over the loaded config only
/// when given on the command line.
class FlagSet {
 public:
  FlagSet(CLI::App* app, RunConfig* scratch) : app_(app), scratch_(scratch) {}

  template <class T>
  FlagSet& add(const std::string& name, T RunConfig::*field, const std::string& help) {
    CLI::Option* opt = app_->add_option(name, scratch_->*field, help);
    bindings_.push_back({opt, [field](RunConfig& dst, const RunConfig& src) {
                           dst.*field = src.*field;
                         }});
    return *this;
  }

  template <class T>
  FlagSet& add(const std::string& name, std::function<T&(RunConfig&)> field,
               const std::string& help) {
    CLI::Option* opt = app_->add_option(name, field(*scratch_), help);
    if constexpr (is_vector<T>) opt->delimiter(',');
    bindings_.push_back({opt, [field](RunConfig& dst, const RunConfig& src) {
                           field(dst) = field(const_cast<RunConfig&>(src));
                         }});
    return *this;
  }

  FlagSet& add_flag(const std::string& name, bool RunConfig::*field, const std::string& help) {
    CLI::Option* opt = app_->add_flag(name, scratch_->*field, help);
    bindings_.push_back({opt, [field](RunConfig& dst, const RunConfig& src) {
                           dst.*field = src.*field;
                         }});
    return *this;
  }

  void apply(RunConfig& dst) const {
    for (const auto& [opt, copy] : bindings_) {
      if (opt->count() > 0) copy(dst, *scratch_);
    }
  }

 private:
  CLI::App* app_;
  RunConfig* scratch_;
  std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&, const RunConfig&)>>>
      bindings_;
};

template <class T>
std::function<T&(RunConfig&)> sched(T ScheduleConfig::*f) {
  return [f](RunConfig& c) -> T& { return c.schedule.*f; };
}

template <class T>
std::function<T&(RunConfig&)> xfer(T TransferConfig::*f) {
  return [f](RunConfig& c) -> T& { return c.transfer.*f; };
}

void add_common(FlagSet& flags) {
  flags.add("--output,-o", &RunConfig::output, "Root directory for run outputs")
      .add("--cache-dir", &RunConfig::cache_dir, "Basis cache directory (default: $CFMAPS_CACHE_DIR)")
      .add_flag("--no-cache", &RunConfig::no_cache, "Compute bases without the cache")
      .add("--seed", &RunConfig::seed, "Random seed")
      .add("--threads,-j", &RunConfig::threads, "Worker threads (0: logical cores)")
      .add("--name", &RunConfig::name, "Pair name used in tables");
}

void add_pair(FlagSet& flags) {
  flags.add("--source,-s", &RunConfig::source, "Source mesh (off, obj, ply)")
      .add("--target,-t", &RunConfig::target, "Target mesh (off, obj, ply)")
      .add("--ground-truth", &RunConfig::ground_truth, "Ground-truth point map source -> target");
}

void add_spectral(FlagSet& flags) {
  flags.add("--k,-k", &RunConfig::k, "Number of real eigenfunctions")
      .add("--k-complex", &RunConfig::k_complex, "Number of complex eigenfunctions (0: k)");
}

void add_match(FlagSet& flags) {
  flags.add("--descriptors", &RunConfig::descriptor_count, "Number of WKS descriptors")
      .add("--descriptor-variance", &RunConfig::descriptor_variance, "WKS variance")
      .add("--weight-descriptor", &RunConfig::weight_descriptor, "Descriptor term weight")
      .add("--weight-commutativity", &RunConfig::weight_commutativity,
           "Descriptor commutativity weight")
      .add("--weight-laplacian", &RunConfig::weight_laplacian, "Laplacian commutativity weight")
      .add("--icp", &RunConfig::icp_iterations, "Spectral ICP iterations")
      .add("--q-solver", &RunConfig::q_solver, "Q estimator: procrustes or lsq");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Complex functional maps: bases, matching, refinement, vector field transfer"};
  app.require_subcommand(1);
  app.set_version_flag("--version", CFMAPS_VERSION);

  RunConfig scratch;
  std::string config_path;
  struct Sub {
    CLI::App* app;
    Command run;
    std::unique_ptr<FlagSet> flags;
  };
  std::vector<Sub> subs;
  auto make = [&](const std::string& name, const std::string& help, Command cmd) -> FlagSet& {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config,-c", config_path, "JSON config; flags override its values");
    subs.push_back({sub, cmd, std::make_unique<FlagSet>(sub, &scratch)});
    add_common(*subs.back().flags);
    return *subs.back().flags;
  };

  {
    auto& f = make("basis", "Compute and cache the real and complex eigenbases of a mesh", cmd_basis);
    f.add("--mesh,-m", &RunConfig::mesh, "Mesh file");
    add_spectral(f);
  }
  {
    auto& f = make("match", "Descriptor-based functional map, Q and point maps", cmd_match);
    add_pair(f);
    add_spectral(f);
    add_match(f);
  }
  {
    auto& f = make("refine", "Refine a point map with a ZoomOut-family algorithm", cmd_refine);
    add_pair(f);
    f.add("--algo", &RunConfig::algo, "zo, czo, cbzo, cdo-conf or cdo-iso")
        .add("--k-start", sched(&ScheduleConfig::k_start), "First basis size")
        .add("--k-end", sched(&ScheduleConfig::k_end), "Last basis size")
        .add("--step", sched(&ScheduleConfig::step), "Basis size increment")
        .add("--inner", sched(&ScheduleConfig::inner), "Inner iterations per basis size")
        .add("--use-q-step", &RunConfig::use_q_step, "Use the complex step (true/false)")
        .add("--initial-map", &RunConfig::initial_map, "Initial point map (default: random)");
  }
  {
    auto& f = make("transfer", "Tangent vector field transfer benchmark", cmd_transfer);
    add_pair(f);
    add_spectral(f);
    f.add("--symmetry", &RunConfig::symmetry, "Orientation-reversing self-map of the target")
        .add("--field", xfer(&TransferConfig::field),
             "random, coordinate-x, coordinate-y or coordinate-z")
        .add("--methods", xfer(&TransferConfig::methods), "complex, hodge, lsq")
        .add("--noise", xfer(&TransferConfig::noise_kinds), "none, random, symmetric")
        .add("--levels", xfer(&TransferConfig::levels), "Noise levels (s or a)")
        .add("--k-values", xfer(&TransferConfig::k_values), "Basis sizes to evaluate")
        .add("--q-solver", &RunConfig::q_solver, "Q estimator: procrustes or lsq");
  }
  {
    auto& f = make("eval", "Geodesic error of a map, or of the match pipeline on a dataset",
                   cmd_eval);
    add_pair(f);
    add_spectral(f);
    add_match(f);
    f.add("--map", &RunConfig::map, "Point map to evaluate")
        .add("--symmetry", &RunConfig::symmetry, "Target self-symmetry for flip rates")
        .add("--dataset", &RunConfig::dataset, "Dataset manifest (JSON)");
  }
  {
    auto& f = make("synth", "Write a synthetic pair with ground truth and a dataset manifest",
                   cmd_synth);
    f.add("--shape", &RunConfig::shape, "sphere, bumpy or blob")
        .add("--level", &RunConfig::level, "Icosphere subdivision level");
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  const Sub* chosen = nullptr;
  for (const auto& s : subs) {
    if (s.app->parsed()) chosen = &s;
  }

  std::unique_ptr<RunDirectory> run;
  std::mutex warn_mutex;
  auto previous = set_warning_sink([&](const Warning& w) {
    std::lock_guard lock(warn_mutex);
    err << "warning[" << w.code << "]: " << w.message << '\n';
    if (run) run->add_warning(w.code, w.message);
  });
  struct Restore {
    WarningSink sink;
    ~Restore() { set_warning_sink(std::move(sink)); }
  } restore{std::move(previous)};

  try {
    RunConfig config = config_path.empty() ? RunConfig{} : load_config(config_path);
    chosen->flags->apply(config);
    validate(config);
    run = std::make_unique<RunDirectory>(config.output, chosen->app->get_name());
    if (!config_path.empty()) run->add_input("config", config_path);
    Invocation io{args, out, err};
    chosen->run(config, *run, io);
    run->write_manifest(to_json(config), args);
    out << "run directory: " << run->path().string() << '\n';
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvalidArgument& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const FormatError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const StructuralError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const SolverError& e) {
    err << "solver failure: " << e.what() << '\n';
    return kExitSolver;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitSolver;
  }
}

}  // namespace cfmaps::cli
