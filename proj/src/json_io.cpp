#include "invcorr/json_io.hpp"

namespace invcorr {

namespace {

Json matrix_rows(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      row.push_back(m(i, j));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd rows_to_matrix(const Json& rows) {
  if (!rows.is_array() || rows.empty()) {
    fail(ErrorCode::io, "expected a nonempty array of rows");
  }
  const auto nrows = static_cast<Eigen::Index>(rows.size());
  const auto ncols = static_cast<Eigen::Index>(rows.front().size());
  Eigen::MatrixXd m(nrows, ncols);
  for (Eigen::Index i = 0; i < nrows; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    if (static_cast<Eigen::Index>(row.size()) != ncols) {
      fail(ErrorCode::io, "ragged matrix rows");
    }
    for (Eigen::Index j = 0; j < ncols; ++j) {
      m(i, j) = row[static_cast<std::size_t>(j)].get<double>();
    }
  }
  return m;
}

Json weights_to_json(const std::vector<std::pair<SetPartition, double>>& weights) {
  Json array = Json::array();
  for (const auto& [partition, alpha] : weights) {
    Json entry;
    entry["blocks"] = to_json(partition)["blocks"];
    entry["alpha"] = alpha;
    array.push_back(std::move(entry));
  }
  return array;
}

std::vector<std::pair<SetPartition, double>> weights_from_json(const Json& array,
                                                               int d) {
  std::vector<std::pair<SetPartition, double>> weights;
  for (const auto& entry : array) {
    std::vector<std::vector<int>> blocks;
    for (const auto& block : entry.at("blocks")) {
      blocks.push_back(block.get<std::vector<int>>());
    }
    weights.emplace_back(make_partition(d, std::move(blocks)),
                         entry.at("alpha").get<double>());
  }
  return weights;
}

}  // namespace

Json to_json(const SetPartition& partition) {
  Json json;
  json["d"] = partition.d;
  json["blocks"] = partition.blocks;
  return json;
}

SetPartition partition_from_json(const Json& json) {
  std::vector<std::vector<int>> blocks;
  for (const auto& block : json.at("blocks")) {
    blocks.push_back(block.get<std::vector<int>>());
  }
  return make_partition(json.at("d").get<int>(), std::move(blocks));
}

Json to_json(const CorrMatrix& matrix) {
  Json json;
  json["d"] = matrix.d;
  json["rows"] = matrix_rows(matrix.entries);
  return json;
}

CorrMatrix corr_matrix_from_json(const Json& json) {
  Eigen::MatrixXd entries = rows_to_matrix(json.at("rows"));
  if (json.contains("d") &&
      json.at("d").get<int>() != static_cast<int>(entries.rows())) {
    fail(ErrorCode::io, "declared d does not match the row count");
  }
  return make_corr_matrix(std::move(entries));
}

Json to_json(const MembershipCert& cert) {
  Json json;
  json["member"] = cert.member;
  json["residual"] = cert.residual;
  json["weights"] = weights_to_json(cert.weights);
  json["reconstruction_error"] = cert.reconstruction_error;
  if (!cert.reason.empty()) json["reason"] = cert.reason;
  if (cert.fast_rejected) json["fast_rejected"] = true;
  return json;
}

Json to_json(const ExactMembershipCert& cert) {
  Json json;
  json["member"] = cert.member;
  json["exact"] = true;
  json["residual"] = rational_to_json(cert.residual);
  Json weights = Json::array();
  for (const auto& [partition, alpha] : cert.weights) {
    Json entry;
    entry["blocks"] = to_json(partition)["blocks"];
    entry["alpha"] = rational_to_json(alpha);
    weights.push_back(std::move(entry));
  }
  json["weights"] = std::move(weights);
  if (!cert.reason.empty()) json["reason"] = cert.reason;
  if (cert.fast_rejected) json["fast_rejected"] = true;
  return json;
}

Json to_json(const JointPMF& pmf) {
  Json json;
  json["x_atoms"] = pmf.x_atoms;
  json["y_atoms"] = pmf.y_atoms;
  json["P"] = matrix_rows(pmf.P);
  return json;
}

JointPMF joint_pmf_from_json(const Json& json) {
  return make_joint_pmf(json.at("x_atoms").get<std::vector<double>>(),
                        json.at("y_atoms").get<std::vector<double>>(),
                        rows_to_matrix(json.at("P")));
}

Json to_json(const GammaModel& model) {
  Json json;
  json["d"] = model.d;
  json["weights"] = weights_to_json(model.components);
  return json;
}

GammaModel gamma_model_from_json(const Json& json) {
  const int d = json.at("d").get<int>();
  return make_gamma_model(d, weights_from_json(json.at("weights"), d), 1e-9);
}

Json to_json(const GridPMF& pmf) {
  Json json;
  json["levels"] = pmf.levels;
  json["probs"] = pmf.probs;
  return json;
}

GridPMF grid_pmf_from_json(const Json& json) {
  return make_grid_pmf(
      json.at("levels").get<std::vector<std::vector<double>>>(),
      json.at("probs").get<std::vector<double>>());
}

Json to_json(const PrdWitness& witness) {
  Json json;
  json["index"] = witness.index;
  json["upset"] = witness.upset_cells;
  json["x"] = witness.x;
  json["x_prime"] = witness.x_prime;
  json["p_x"] = witness.p_x;
  json["p_x_prime"] = witness.p_x_prime;
  return json;
}

Json to_json(const InvarianceReport& report) {
  Json json;
  json["mode"] = to_string(report.mode);
  if (report.target_matrix.size() > 0) {
    json["target"] = matrix_rows(report.target_matrix);
  } else {
    json["target"] = report.target_r;
  }
  json["max_abs_deviation"] = report.max_abs_deviation;
  json["verdict"] = report.inconclusive ? "inconclusive"
                    : report.pass       ? "pass"
                                        : "fail";
  json["skipped"] = report.skipped_count;
  if (!report.failing_ids.empty()) json["failing"] = report.failing_ids;
  if (report.structural_r.has_value()) {
    json["structural_r"] = *report.structural_r;
  }
  json["structural_invariant"] = report.structural_invariant;
  json["oracle_structural_agree"] = report.oracle_structural_agree;
  Json records = Json::array();
  for (const auto& record : report.records) {
    Json row;
    row["id"] = record.id;
    if (record.skipped) {
      row["skipped"] = true;
    } else {
      row["estimate"] = record.estimate;
      row["se"] = record.se;
      row["deviation"] = record.deviation;
      row["passed"] = record.passed;
    }
    records.push_back(std::move(row));
  }
  json["records"] = std::move(records);
  return json;
}

Json to_json(const TailDependenceEstimate& estimate) {
  Json json;
  json["lambda_hat"] = estimate.lambda_hat;
  json["tail_count"] = estimate.tail_count;
  json["stable"] = estimate.stable;
  if (!estimate.stable) {
    json["warning"] = "fewer than 100 expected tail points; estimate unstable";
  }
  return json;
}

Json rational_to_json(const mpq_class& value) {
  Json json;
  json["num"] = value.get_num().get_str();
  json["den"] = value.get_den().get_str();
  return json;
}

Json error_to_json(const Error& error) {
  Json json;
  json["error"]["code"] = to_string(error.code());
  json["error"]["message"] = error.what();
  return json;
}

}  // namespace invcorr
