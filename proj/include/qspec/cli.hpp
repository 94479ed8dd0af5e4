#pragma once

// The `qspec` command line. run_cli() is the whole program; tools/qspec.cpp only forwards argv.
//
// Exit codes: 0 success, 1 a verification check failed, 2 unreadable input or bad usage,
// 3 eigensolver or internal consistency failure, 4 input must be normal but is not.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qspec/bounded_transform.hpp"
#include "qspec/errors.hpp"
#include "qspec/io.hpp"
#include "qspec/named_functions.hpp"
#include "qspec/random.hpp"
#include "qspec/s_spectrum.hpp"
#include "qspec/spectral_core.hpp"
#include "qspec/verify.hpp"

namespace qspec {

enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,
  kExitUsage = 2,
  kExitSolver = 3,
  kExitNotNormal = 4,
};

struct RunConfig {
  std::string command;
  std::string input;
  std::string output;
  std::string j{"e1"};
  double atol{1e-12};
  double rtol{1e-10};
  std::uint64_t seed{42};
  std::string fn{"id"};
  std::string format{"json"};
  std::size_t n{4};
};

namespace detail {

inline void emit(const RunConfig& cfg, const std::string& text, std::ostream& out) {
  if (cfg.output.empty()) {
    out << text;
    return;
  }
  std::ofstream f(cfg.output, std::ios::binary);
  if (!f) throw ParseError("cannot write " + cfg.output);
  f << text;
}

inline QMatrix require_input(const RunConfig& cfg) {
  if (cfg.input.empty()) throw ParseError(cfg.command + ": --input is required");
  return load_matrix(cfg.input);
}

inline int execute(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (!(cfg.atol > 0.0) || !(cfg.rtol > 0.0)) throw ParseError("tolerances must be positive");
  const ImaginaryUnit j = parse_imaginary_unit(cfg.j);
  const Tolerance tol{cfg.atol, cfg.rtol};

  if (cfg.command == "spectrum") {
    const auto spec = s_spectrum(require_input(cfg), j);
    emit(cfg, cfg.format == "csv" ? spectrum_csv(spec) : canonical_json(to_json(spec)), out);
    return kExitOk;
  }
  if (cfg.command == "decompose") {
    emit(cfg, canonical_json(to_json(decompose_TABJ(require_input(cfg), j))), out);
    return kExitOk;
  }
  if (cfg.command == "measure") {
    emit(cfg, canonical_json(to_json(spectral_measure(require_input(cfg), j))), out);
    return kExitOk;
  }
  if (cfg.command == "apply") {
    const auto f = parse_named_function(cfg.fn);
    const auto e = spectral_measure(require_input(cfg), j);
    emit(cfg, canonical_json(to_json(apply_named(e, f))), out);
    return kExitOk;
  }
  if (cfg.command == "transform") {
    const QMatrix t = require_input(cfg);
    TransformSummary summary;
    const auto rep = verify_transform(t, tol, 1e-8, j, &summary);
    emit(cfg, canonical_json(to_json(summary, is_normal(t))), out);
    if (!rep.passed()) err << "transform: identity checks failed\n";
    return rep.passed() ? kExitOk : kExitCheckFailed;
  }
  if (cfg.command == "verify") {
    QMatrix t;
    if (cfg.input.empty()) {
      Rng rng(cfg.seed);
      t = random_normal(cfg.n, rng);
    } else {
      t = load_matrix(cfg.input);
    }
    VerifyConfig vc;
    vc.tol = tol;
    vc.j = j;
    vc.seed = cfg.seed;
    const auto rep = verify_matrix(t, vc);
    emit(cfg, canonical_json(to_json(rep)), out);
    if (!rep.passed())
      for (const auto& it : rep.items())
        if (!it.pass) err << "verify: " << it.name << " = " << it.value << " > " << it.threshold << "\n";
    return rep.passed() ? kExitOk : kExitCheckFailed;
  }
  throw ParseError("unknown command " + cfg.command);
}

}  // namespace detail

/// args[0] is the program name.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  RunConfig cfg;
  CLI::App app{"Quaternionic spectral decomposition of normal matrices", "qspec"};
  app.require_subcommand(1);

  const auto add_common = [&](CLI::App* sub, bool input_required) {
    auto* in = sub->add_option("--input", cfg.input, "matrix JSON file");
    if (input_required) in->required();
    sub->add_option("--output", cfg.output, "write the report here instead of stdout");
    sub->add_option("--j", cfg.j, "imaginary unit of the slice: e1, e2, e3 or x,y,z");
    sub->add_option("--atol", cfg.atol, "absolute tolerance");
    sub->add_option("--rtol", cfg.rtol, "relative tolerance");
    sub->add_option("--seed", cfg.seed, "random seed");
  };
  auto* spectrum = app.add_subcommand("spectrum", "S-spectrum as eigenspheres");
  add_common(spectrum, true);
  spectrum->add_option("--format", cfg.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  add_common(app.add_subcommand("decompose", "T = A + J B"), true);
  add_common(app.add_subcommand("measure", "atomic spectral measure"), true);
  auto* apply_cmd = app.add_subcommand("apply", "f(T) for a named function");
  add_common(apply_cmd, true);
  apply_cmd->add_option("--fn", cfg.fn, "id, const:c, re, immag, sq, sqrt, exp_re, exp, norm2, inv, chi:k");
  add_common(app.add_subcommand("transform", "bounded transform report"), true);
  auto* verify_cmd = app.add_subcommand("verify", "run every identity check");
  add_common(verify_cmd, false);
  verify_cmd->add_option("--n", cfg.n, "size of the random normal matrix used without --input");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  cfg.command = app.get_subcommands().front()->get_name();

  try {
    return detail::execute(cfg, out, err);
  } catch (const NotNormalError& e) {
    err << "error: " << e.what() << "\n";
    return kExitNotNormal;
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const ConsistencyError& e) {
    err << "error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace qspec
