// Timing comparison of the OpenMP kernel paths against their serial
// references. The outputs must match bit for bit; only the wall time may
// differ.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "invcorr/models.hpp"
#include "invcorr/stats.hpp"

using namespace invcorr;

namespace {

double time_seconds(const std::function<void()>& work) {
  const auto start = std::chrono::steady_clock::now();
  work();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

void report(const std::string& name, double serial, double parallel,
            bool identical) {
  std::printf("%-28s serial %8.3fs   parallel %8.3fs   speedup %5.2fx   %s\n",
              name.c_str(), serial, parallel, serial / parallel,
              identical ? "bit-identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  std::int64_t rows = 2'000'000;
  if (argc > 1) rows = std::atoll(argv[1]);
#ifdef _OPENMP
  std::printf("threads: %d, rows: %lld\n", omp_get_max_threads(),
              static_cast<long long>(rows));
#else
  std::printf("threads: 1 (OpenMP off), rows: %lld\n",
              static_cast<long long>(rows));
#endif

  const GammaModel model =
      make_gamma_model(4, {{make_partition(4, {{1, 2, 3, 4}}), 0.2},
                           {make_partition(4, {{1, 2}, {3, 4}}), 0.3},
                           {make_partition(4, {{1}, {2}, {3}, {4}}), 0.5}});
  SampleMatrix gamma_par, gamma_ser;
  const double t_gamma_par =
      time_seconds([&] { gamma_par = sample_gamma_model(model, rows, 1); });
  const double t_gamma_ser = time_seconds(
      [&] { gamma_ser = sample_gamma_model_serial(model, rows, 1); });
  report("gamma sampler", t_gamma_ser, t_gamma_par,
         gamma_par.data == gamma_ser.data);

  const ConformalSpec spec{16, 2};
  SampleMatrix conf_par, conf_ser;
  const double t_conf_par =
      time_seconds([&] { conf_par = sample_conformal(spec, rows, 2); });
  const double t_conf_ser =
      time_seconds([&] { conf_ser = sample_conformal_serial(spec, rows, 2); });
  report("conformal sampler", t_conf_ser, t_conf_par,
         conf_par.data == conf_ser.data);

  Eigen::Matrix3d board;
  board << 1.0 / 9, 2.0 / 9, 0.0,
           0.0, 1.0 / 9, 2.0 / 9,
           2.0 / 9, 0.0, 1.0 / 9;
  SampleMatrix cb_par, cb_ser;
  const double t_cb_par = time_seconds(
      [&] { cb_par = sample_checkerboard_quasi_frechet(board, 0.3, rows, 3); });
  const double t_cb_ser = time_seconds([&] {
    cb_ser = sample_checkerboard_quasi_frechet_serial(board, 0.3, rows, 3);
  });
  report("checkerboard sampler", t_cb_ser, t_cb_par,
         cb_par.data == cb_ser.data);

  double corr_par = 0.0, corr_ser = 0.0;
  const double t_corr_par = time_seconds([&] {
    for (int rep = 0; rep < 10; ++rep) {
      corr_par = pearson(column(gamma_par, 0), column(gamma_par, 1));
    }
  });
  const double t_corr_ser = time_seconds([&] {
    for (int rep = 0; rep < 10; ++rep) {
      corr_ser = pearson_serial(column(gamma_ser, 0), column(gamma_ser, 1));
    }
  });
  report("pearson estimator (x10)", t_corr_ser, t_corr_par,
         std::abs(corr_par - corr_ser) <= 1e-12);

  return 0;
}
