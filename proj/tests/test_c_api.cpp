#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <unistd.h>

#include <cstdio>
#include <cstring>
#include <string>

#include "curesem/curesem.h"
#include "doctest.h"
#include "json.hpp"

using nlohmann::json;

namespace {

std::string tmp_path(const char* name) {
  return std::string("/tmp/curesem_capi_") + std::to_string(::getpid()) + "_" + name;
}

std::string write_small_csv() {
  const std::string path = tmp_path("data.csv");
  std::FILE* f = std::fopen(path.c_str(), "w");
  REQUIRE(f != nullptr);
  std::fputs("time,status,x_g,z_g\n", f);
  // two balanced groups, a mix of events and censorings
  const double t[] = {0.21, 0.40, 0.62, 0.85, 1.05, 1.33, 1.61, 1.92, 2.30, 2.90,
                      0.17, 0.33, 0.52, 0.71, 0.95, 1.21, 1.52, 1.85, 2.21, 2.75};
  for (int i = 0; i < 20; ++i) {
    const int g = i < 10 ? 1 : 2;
    const int d = (i % 3) != 0;
    std::fprintf(f, "%.2f,%d,%d,%d\n", t[i], d, g, g);
  }
  std::fclose(f);
  return path;
}

struct Free {
  curesem_dataset* ds = nullptr;
  curesem_result* res = nullptr;
  ~Free() {
    curesem_dataset_free(ds);
    curesem_result_free(res);
  }
};

}  // namespace

TEST_CASE("version string and null-safety") {
  REQUIRE(curesem_version() != nullptr);
  CHECK(std::strcmp(curesem_version(), "0.1.0") == 0);
  curesem_dataset_free(nullptr);
  curesem_result_free(nullptr);
  CHECK(curesem_last_error() != nullptr);
}

TEST_CASE("dataset load, row count, and error reporting") {
  const std::string path = write_small_csv();
  Free h;
  REQUIRE(curesem_dataset_load(path.c_str(), &h.ds) == CURESEM_OK);
  REQUIRE(h.ds != nullptr);
  size_t rows = 0;
  REQUIRE(curesem_dataset_rows(h.ds, &rows) == CURESEM_OK);
  CHECK(rows == 20);
  CHECK(curesem_dataset_rows(nullptr, &rows) == CURESEM_USAGE_ERROR);
  CHECK(curesem_dataset_rows(h.ds, nullptr) == CURESEM_USAGE_ERROR);

  curesem_dataset* missing = nullptr;
  CHECK(curesem_dataset_load("/nonexistent/x.csv", &missing) == CURESEM_USAGE_ERROR);
  CHECK(missing == nullptr);
  CHECK(std::strlen(curesem_last_error()) > 0);
  CHECK(curesem_dataset_load(nullptr, &missing) == CURESEM_USAGE_ERROR);
  CHECK(curesem_dataset_load(path.c_str(), nullptr) == CURESEM_USAGE_ERROR);
  std::remove(path.c_str());
}

TEST_CASE("fit through the C surface is deterministic and inspectable") {
  const std::string path = write_small_csv();
  Free h;
  REQUIRE(curesem_dataset_load(path.c_str(), &h.ds) == CURESEM_OK);
  const char* cfg = R"({"algo": "sem", "iters": 10, "burnin": 4, "seed": 7})";
  REQUIRE(curesem_fit(h.ds, cfg, &h.res) == CURESEM_OK);
  REQUIRE(h.res != nullptr);
  const std::string report1 = curesem_result_json(h.res);

  curesem_result* again = nullptr;
  REQUIRE(curesem_fit(h.ds, cfg, &again) == CURESEM_OK);
  CHECK(report1 == std::string(curesem_result_json(again)));
  curesem_result_free(again);

  const json doc = json::parse(report1);
  CHECK(doc.at("schema") == 1);
  CHECK(doc.at("algorithm") == "sem");
  CHECK(doc.at("n") == 20);
  CHECK(doc.at("estimates").contains("phi"));

  // error taxonomy: bad config -> usage, unusable numbers -> numeric
  curesem_result* bad = nullptr;
  CHECK(curesem_fit(h.ds, "{not json", &bad) == CURESEM_USAGE_ERROR);
  CHECK(bad == nullptr);
  CHECK(curesem_fit(h.ds, R"({"algo": "nope"})", &bad) == CURESEM_USAGE_ERROR);
  CHECK(curesem_fit(h.ds, R"({"algo": "sem", "bogus": 1})", &bad) == CURESEM_USAGE_ERROR);
  CHECK(curesem_fit(nullptr, cfg, &bad) == CURESEM_USAGE_ERROR);
  CHECK(curesem_fit(h.ds, cfg, nullptr) == CURESEM_USAGE_ERROR);
  CHECK(std::strlen(curesem_last_error()) > 0);
  CHECK(curesem_fit(h.ds, R"({"algo": "em", "phi-grid": "1:2:0.5", "iters": 1})", &bad) ==
        CURESEM_NUMERIC_ERROR);
  CHECK(bad == nullptr);
  std::remove(path.c_str());
}

TEST_CASE("simulate and diagnose round trip through the C surface") {
  const char* scenario = R"({
    "n": 80, "groups": 2, "cure-targets": [0.6, 0.3],
    "censor-targets": [0.75, 0.5], "phi-true": 1.0, "gamma1-true": 0.5,
    "alpha0-true": -0.5, "alpha1-true": 0.2, "replicates": 2, "seed": 5
  })";
  Free h;
  REQUIRE(curesem_simulate(scenario, R"({"algos": ["sem"], "jobs": 2})", &h.res) ==
          CURESEM_OK);
  const json sim = json::parse(curesem_result_json(h.res));
  REQUIRE(sim.at("files").size() == 4);
  bool saw_raw = false;
  for (const auto& f : sim.at("files"))
    saw_raw = saw_raw || f.at("suffix") == "-raw.json";
  CHECK(saw_raw);

  curesem_result* bad = nullptr;
  CHECK(curesem_simulate("{}", R"({"algos": ["wat"]})", &bad) == CURESEM_USAGE_ERROR);
  CHECK(curesem_simulate("{broken", "{}", &bad) == CURESEM_USAGE_ERROR);

  // fit then diagnose the same data through the API
  const std::string path = write_small_csv();
  Free g;
  REQUIRE(curesem_dataset_load(path.c_str(), &g.ds) == CURESEM_OK);
  REQUIRE(curesem_fit(g.ds, R"({"algo": "dm"})", &g.res) == CURESEM_OK);
  const std::string fit_json = curesem_result_json(g.res);
  curesem_result* diag = nullptr;
  REQUIRE(curesem_diagnose(g.ds, fit_json.c_str(), R"({"seed": 11})", &diag) ==
          CURESEM_OK);
  const json dd = json::parse(curesem_result_json(diag));
  curesem_result_free(diag);
  REQUIRE(dd.at("files").size() == 4);
  CHECK(dd.at("ks").at("p").get<double>() >= 0.0);
  CHECK(dd.at("ks").at("p").get<double>() <= 1.0);

  CHECK(curesem_diagnose(g.ds, "{broken", "{}", &diag) == CURESEM_USAGE_ERROR);
  std::remove(path.c_str());
}
