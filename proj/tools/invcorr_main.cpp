#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "invcorr/json_io.hpp"
#include "invcorr/stats.hpp"

namespace {

using invcorr::Json;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNegative = 2;
constexpr int kExitInconclusive = 3;

// Exactly one input source: a file path or inline JSON.
Json load_input(const std::string& path, const std::string& inline_json) {
  if (path.empty() == inline_json.empty()) {
    invcorr::fail(invcorr::ErrorCode::io,
                  "provide exactly one of --input or --json");
  }
  if (!inline_json.empty()) {
    return Json::parse(inline_json);
  }
  std::ifstream in(path);
  if (!in) {
    invcorr::fail(invcorr::ErrorCode::io, "cannot open input file " + path);
  }
  Json json;
  in >> json;
  return json;
}

// Writes via a temp file and rename so readers never see partial output.
void emit(const std::string& output_path, const std::string& text) {
  if (output_path.empty()) {
    std::cout << text;
    if (text.empty() || text.back() != '\n') std::cout << '\n';
    return;
  }
  namespace fs = std::filesystem;
  const fs::path target(output_path);
  const fs::path temp = target.string() + ".tmp";
  {
    std::ofstream out(temp);
    if (!out) {
      invcorr::fail(invcorr::ErrorCode::io, "cannot write " + temp.string());
    }
    out << text;
  }
  fs::rename(temp, target);
}

std::uint64_t require_seed(const std::optional<std::uint64_t>& seed) {
  if (!seed.has_value()) {
    invcorr::fail(invcorr::ErrorCode::parameter,
                  "--seed is required for sampling (no wall-clock default)");
  }
  return *seed;
}

int infer_partition_d(const Json& weights) {
  if (weights.empty()) {
    invcorr::fail(invcorr::ErrorCode::structure, "certificate has no weights");
  }
  int count = 0;
  for (const auto& block : weights.front().at("blocks")) {
    count += static_cast<int>(block.size());
  }
  return count;
}

struct SamplerSpec {
  invcorr::SamplerFn sampler;
  int d = 0;
  std::optional<invcorr::CorrMatrix> implied_target;
};

// Accepts a GammaModel, a membership certificate, a Markov spec
// {"stay_probs":[...]}, a conformal spec {"n":..,"m":..} or a checkerboard
// spec {"P3":[[...]],"r":...}.
SamplerSpec resolve_sampler(const Json& json) {
  SamplerSpec spec;
  if (json.contains("stay_probs")) {
    const auto stay = json.at("stay_probs").get<std::vector<double>>();
    const invcorr::GammaModel model = invcorr::markov_gamma_model(stay);
    spec.d = model.d;
    spec.implied_target = invcorr::expected_corr(model);
    spec.sampler = [stay](std::int64_t count, std::uint64_t seed) {
      return invcorr::sample_markov_model(stay, count, seed).samples;
    };
    return spec;
  }
  if (json.contains("n") && json.contains("m")) {
    invcorr::ConformalSpec conformal{json.at("n").get<int>(),
                                     json.at("m").get<int>()};
    spec.d = conformal.m;
    const double r = invcorr::conformal_corr(conformal.n).get_d();
    Eigen::MatrixXd target =
        Eigen::MatrixXd::Constant(conformal.m, conformal.m, r);
    target.diagonal().setOnes();
    spec.implied_target = invcorr::make_corr_matrix(std::move(target));
    spec.sampler = [conformal](std::int64_t count, std::uint64_t seed) {
      return invcorr::sample_conformal(conformal, count, seed);
    };
    return spec;
  }
  if (json.contains("P3")) {
    Eigen::Matrix3d p3;
    const auto rows = json.at("P3");
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        p3(i, j) = rows.at(static_cast<std::size_t>(i))
                       .at(static_cast<std::size_t>(j))
                       .get<double>();
      }
    }
    const double r = json.at("r").get<double>();
    spec.d = 2;
    Eigen::MatrixXd target(2, 2);
    target << 1.0, r, r, 1.0;
    spec.implied_target = invcorr::make_corr_matrix(std::move(target));
    spec.sampler = [p3, r](std::int64_t count, std::uint64_t seed) {
      return invcorr::sample_checkerboard_quasi_frechet(p3, r, count, seed);
    };
    return spec;
  }
  invcorr::GammaModel model;
  if (json.contains("member")) {
    if (!json.at("member").get<bool>()) {
      invcorr::fail(invcorr::ErrorCode::structure,
                    "cannot sample from a non-member certificate");
    }
    Json as_model;
    as_model["d"] = infer_partition_d(json.at("weights"));
    as_model["weights"] = json.at("weights");
    model = invcorr::gamma_model_from_json(as_model);
  } else {
    model = invcorr::gamma_model_from_json(json);
  }
  spec.d = model.d;
  spec.implied_target = invcorr::expected_corr(model);
  spec.sampler = [model](std::int64_t count, std::uint64_t seed) {
    return invcorr::sample_gamma_model(model, count, seed);
  };
  return spec;
}

int cmd_bell(int d, bool list, const std::string& output) {
  std::ostringstream out;
  if (list) {
    Json json;
    json["d"] = d;
    json["bell"] = invcorr::bell_number(d).get_str();
    Json partitions = Json::array();
    for (const auto& partition : invcorr::enumerate_partitions(d)) {
      partitions.push_back(invcorr::to_json(partition));
    }
    json["partitions"] = std::move(partitions);
    out << json.dump(2);
  } else {
    out << invcorr::bell_number(d).get_str();
  }
  emit(output, out.str());
  return kExitOk;
}

int cmd_membership(const Json& input, double tol, bool exact,
                   const std::string& output) {
  const invcorr::CorrMatrix matrix = invcorr::corr_matrix_from_json(input);
  bool member = false;
  Json json;
  if (exact) {
    const invcorr::ExactMembershipCert cert = invcorr::membership_exact(matrix);
    member = cert.member;
    json = invcorr::to_json(cert);
  } else {
    const invcorr::MembershipCert cert = invcorr::membership(matrix, tol);
    member = cert.member;
    json = invcorr::to_json(cert);
  }
  emit(output, json.dump(2));
  return member ? kExitOk : kExitNegative;
}

int cmd_sample(const Json& input, std::int64_t count, std::uint64_t seed,
               int discretize, const std::string& format,
               const std::string& output) {
  const SamplerSpec spec = resolve_sampler(input);
  invcorr::SampleMatrix samples = spec.sampler(count, seed);
  if (discretize > 0) {
    invcorr::apply_marginal_transform(
        samples, invcorr::ceiling_grid_transform(discretize));
  }
  std::ostringstream out;
  if (format == "csv") {
    invcorr::write_csv(out, samples);
  } else {
    Json json;
    json["rows"] = samples.rows;
    json["cols"] = samples.cols;
    Json data = Json::array();
    for (std::int64_t i = 0; i < samples.rows; ++i) {
      Json row = Json::array();
      for (int j = 0; j < samples.cols; ++j) row.push_back(samples(i, j));
      data.push_back(std::move(row));
    }
    json["samples"] = std::move(data);
    out << json.dump(2);
  }
  emit(output, out.str());
  return kExitOk;
}

int cmd_check(const Json& input, const std::string& which, double tol,
              const std::string& conditioning, const std::string& output) {
  Json json;
  bool verdict = false;
  if (which == "prd") {
    invcorr::GridPMF grid = input.contains("levels")
                                ? invcorr::grid_pmf_from_json(input)
                                : invcorr::grid_from_joint(
                                      invcorr::joint_pmf_from_json(input));
    invcorr::PrdOptions options;
    options.tol = tol;
    options.conditioning = conditioning == "tail"
                               ? invcorr::PrdConditioning::tail
                               : invcorr::PrdConditioning::point;
    const invcorr::PrdResult result = invcorr::is_prd(grid, {}, options);
    verdict = result.prd;
    json["check"] = "prd";
    json["conditioning"] = conditioning;
    json["prd"] = result.prd;
    json["upsets_checked"] = result.upsets_checked;
    if (result.witness.has_value()) {
      json["witness"] = invcorr::to_json(*result.witness);
    }
  } else {
    const invcorr::JointPMF pmf = invcorr::joint_pmf_from_json(input);
    json["check"] = which;
    if (which == "quasi-ind") {
      verdict = invcorr::is_quasi_independent(pmf, tol);
      json["quasi_independent"] = verdict;
    } else if (which == "quasi-frechet") {
      const auto fit = invcorr::quasi_frechet_fit(pmf, tol);
      verdict = fit.has_value();
      json["quasi_frechet"] = verdict;
      if (fit) json["r"] = *fit;
    } else if (which == "pqd") {
      verdict = invcorr::is_pqd(pmf, tol);
      json["pqd"] = verdict;
    } else if (which == "nqd") {
      verdict = invcorr::is_nqd(pmf, tol);
      json["nqd"] = verdict;
    } else {
      invcorr::fail(invcorr::ErrorCode::parameter,
                    "unknown check '" + which + "'");
    }
  }
  emit(output, json.dump(2));
  return verdict ? kExitOk : kExitNegative;
}

int cmd_verify(const Json& input, const std::string& target_path,
               const std::string& mode_name, int transforms,
               std::optional<std::int64_t> count,
               std::optional<std::uint64_t> seed, double tol, double alpha,
               const std::string& output) {
  const invcorr::VerifyMode mode = invcorr::verify_mode_from_string(mode_name);
  invcorr::InvarianceReport report;
  if (input.contains("x_atoms")) {
    const invcorr::JointPMF pmf = invcorr::joint_pmf_from_json(input);
    report = invcorr::verify_exact(pmf, mode, transforms,
                                   seed.value_or(0), tol);
  } else {
    const SamplerSpec spec = resolve_sampler(input);
    invcorr::CorrMatrix target;
    if (!target_path.empty()) {
      std::ifstream in(target_path);
      if (!in) {
        invcorr::fail(invcorr::ErrorCode::io,
                      "cannot open target file " + target_path);
      }
      Json target_json;
      in >> target_json;
      target = invcorr::corr_matrix_from_json(target_json);
    } else if (spec.implied_target.has_value()) {
      target = *spec.implied_target;
    } else {
      invcorr::fail(invcorr::ErrorCode::parameter,
                    "--target is required for this sampler");
    }
    report = invcorr::verify_mc(spec.sampler, target, mode, transforms,
                                count.value_or(100'000), require_seed(seed),
                                alpha);
  }
  emit(output, invcorr::to_json(report).dump(2));
  if (report.inconclusive) return kExitInconclusive;
  return report.pass ? kExitOk : kExitNegative;
}

int cmd_conformal_pmf(int n, int m, const std::string& output) {
  invcorr::ConformalSpec spec{n, m};
  Json table = Json::array();
  std::vector<int> indices(static_cast<std::size_t>(m), 1);
  mpq_class total(0);
  while (true) {
    const mpq_class value = invcorr::conformal_joint_pmf(spec, indices);
    total += value;
    Json entry;
    entry["indices"] = indices;
    entry["probability"] = invcorr::rational_to_json(value);
    table.push_back(std::move(entry));
    int position = m - 1;
    while (position >= 0 && indices[static_cast<std::size_t>(position)] == n + 1) {
      indices[static_cast<std::size_t>(position)] = 1;
      --position;
    }
    if (position < 0) break;
    ++indices[static_cast<std::size_t>(position)];
  }
  Json json;
  json["n"] = n;
  json["m"] = m;
  json["grid_denominator"] = n + 1;
  json["total"] = invcorr::rational_to_json(total);
  json["invariant_correlation"] =
      invcorr::rational_to_json(invcorr::conformal_corr(n));
  json["table"] = std::move(table);
  emit(output, json.dump(2));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"invariant-correlation toolkit"};
  app.require_subcommand(1);

  std::string input_path, inline_json, output, format = "json";
  std::string which = "quasi-ind", mode = "all", conditioning = "point";
  std::string target_path;
  double tol_membership = invcorr::kMembershipTol;
  double tol_struct = invcorr::kStructTol;
  double alpha = 0.01;
  int bell_d = 1, transforms = 20, discretize = 0;
  int conformal_n = 8, conformal_m = 2;
  bool bell_list = false, exact = false;
  std::optional<std::int64_t> count;
  std::optional<std::uint64_t> seed;

  auto* bell = app.add_subcommand("bell", "Bell number and partition list");
  bell->add_option("d", bell_d, "ground-set size")->required();
  bell->add_flag("--list", bell_list, "also print all partitions");
  bell->add_option("--output", output);

  auto* membership =
      app.add_subcommand("membership", "certify a matrix against the polytope");
  membership->add_option("--input", input_path);
  membership->add_option("--json", inline_json);
  membership->add_option("--tol", tol_membership);
  membership->add_flag("--exact", exact, "exact rational LP (d <= 5)");
  membership->add_option("--output", output);

  auto* sample = app.add_subcommand("sample", "draw model samples as CSV/JSON");
  sample->add_option("--input", input_path);
  sample->add_option("--json", inline_json);
  sample->add_option("--count", count)->required();
  sample
      ->add_option("--seed", seed,
                   "RNG seed (required; runs are reproducible bit-exact)")
      ->required();
  sample->add_option("--discretize", discretize,
                     "apply g(x) = ceil(n x)/n with this n");
  sample->add_option("--format", format)
      ->check(CLI::IsMember({"csv", "json"}));
  sample->add_option("--output", output);

  auto* check = app.add_subcommand("check", "structural checks on a pmf");
  check->add_option("--input", input_path);
  check->add_option("--json", inline_json);
  check->add_option("--which", which)
      ->check(CLI::IsMember({"quasi-ind", "quasi-frechet", "pqd", "nqd", "prd"}))
      ->required();
  check->add_option("--tol", tol_struct);
  check->add_option("--conditioning", conditioning)
      ->check(CLI::IsMember({"point", "tail"}));
  check->add_option("--output", output);

  auto* verify = app.add_subcommand(
      "verify", "invariance verification (exact pmf or Monte-Carlo sampler)");
  verify->add_option("--input", input_path);
  verify->add_option("--json", inline_json);
  verify->add_option("--target", target_path,
                     "target correlation matrix file (samplers)");
  verify->add_option("--mode", mode)->check(CLI::IsMember({"all", "increasing"}));
  verify->add_option("--transforms", transforms);
  verify->add_option("--count", count);
  verify->add_option("--seed", seed);
  verify->add_option("--tol", tol_struct);
  verify->add_option("--alpha", alpha);
  verify->add_option("--output", output);

  auto* conformal = app.add_subcommand(
      "conformal-pmf", "exact conformal p-value joint pmf table");
  conformal->add_option("--n", conformal_n)->required();
  conformal->add_option("--m", conformal_m)->required();
  conformal->add_option("--output", output);

  CLI11_PARSE(app, argc, argv);

  try {
    if (bell->parsed()) return cmd_bell(bell_d, bell_list, output);
    if (membership->parsed()) {
      return cmd_membership(load_input(input_path, inline_json), tol_membership,
                            exact, output);
    }
    if (sample->parsed()) {
      return cmd_sample(load_input(input_path, inline_json), count.value(),
                        require_seed(seed), discretize, format, output);
    }
    if (check->parsed()) {
      return cmd_check(load_input(input_path, inline_json), which, tol_struct,
                       conditioning, output);
    }
    if (verify->parsed()) {
      return cmd_verify(load_input(input_path, inline_json), target_path, mode,
                        transforms, count, seed, tol_struct, alpha, output);
    }
    if (conformal->parsed()) {
      return cmd_conformal_pmf(conformal_n, conformal_m, output);
    }
  } catch (const invcorr::Error& error) {
    std::cout << invcorr::error_to_json(error).dump(2) << std::endl;
    return kExitError;
  } catch (const Json::exception& error) {
    std::cout << invcorr::error_to_json(
                     invcorr::Error(invcorr::ErrorCode::io, error.what()))
                     .dump(2)
              << std::endl;
    return kExitError;
  }
  return kExitError;
}
