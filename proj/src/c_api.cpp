#include <memory>
#include <new>
#include <string>

#include "curesem/curesem.h"
#include "curesem/io.hpp"
#include "driver.hpp"

struct curesem_dataset {
  curesem::DatasetFile df;
};

struct curesem_result {
  std::string json;
};

namespace {

thread_local std::string g_last_error;

int fail(int code, const std::string& message) {
  g_last_error = message;
  return code;
}

// run an operation whose own errors are usage-vs-numeric typed
template <typename Fn>
int guarded(curesem_result** out, Fn&& fn) {
  if (out == nullptr) return fail(CURESEM_USAGE_ERROR, "null output pointer");
  *out = nullptr;
  try {
    auto res = std::make_unique<curesem_result>();
    res->json = fn();
    *out = res.release();
    g_last_error.clear();
    return CURESEM_OK;
  } catch (const curesem::driver::UsageError& e) {
    return fail(CURESEM_USAGE_ERROR, e.what());
  } catch (const curesem::driver::NumericError& e) {
    return fail(CURESEM_NUMERIC_ERROR, e.what());
  } catch (const std::bad_alloc&) {
    return fail(CURESEM_NUMERIC_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return fail(CURESEM_NUMERIC_ERROR, e.what());
  }
}

}  // namespace

extern "C" {

const char* curesem_version(void) { return "0.1.0"; }

const char* curesem_last_error(void) { return g_last_error.c_str(); }

int curesem_dataset_load(const char* path, curesem_dataset** out) {
  if (path == nullptr || out == nullptr)
    return fail(CURESEM_USAGE_ERROR, "null argument");
  *out = nullptr;
  try {
    auto ds = std::make_unique<curesem_dataset>();
    ds->df = curesem::load_dataset(path);
    *out = ds.release();
    g_last_error.clear();
    return CURESEM_OK;
  } catch (const std::exception& e) {
    return fail(CURESEM_USAGE_ERROR, e.what());
  }
}

int curesem_dataset_rows(const curesem_dataset* data, size_t* out) {
  if (data == nullptr || out == nullptr)
    return fail(CURESEM_USAGE_ERROR, "null argument");
  *out = data->df.obs.size();
  return CURESEM_OK;
}

void curesem_dataset_free(curesem_dataset* data) { delete data; }

int curesem_fit(const curesem_dataset* data, const char* config_json,
                curesem_result** out) {
  if (data == nullptr) return fail(CURESEM_USAGE_ERROR, "null dataset");
  const std::string cfg = config_json ? config_json : "";
  return guarded(out, [&] { return curesem::driver::run_fit(data->df, cfg); });
}

int curesem_simulate(const char* scenario_json, const char* config_json,
                     curesem_result** out) {
  if (scenario_json == nullptr) return fail(CURESEM_USAGE_ERROR, "null scenario");
  const std::string scn = scenario_json;
  const std::string cfg = config_json ? config_json : "";
  return guarded(out, [&] { return curesem::driver::run_simulate(scn, cfg); });
}

int curesem_diagnose(const curesem_dataset* data, const char* fit_json,
                     const char* config_json, curesem_result** out) {
  if (data == nullptr) return fail(CURESEM_USAGE_ERROR, "null dataset");
  if (fit_json == nullptr) return fail(CURESEM_USAGE_ERROR, "null fit report");
  const std::string fit = fit_json;
  const std::string cfg = config_json ? config_json : "";
  return guarded(out, [&] { return curesem::driver::run_diagnose(data->df, fit, cfg); });
}

const char* curesem_result_json(const curesem_result* result) {
  return result ? result->json.c_str() : "";
}

void curesem_result_free(curesem_result* result) { delete result; }

}  // extern "C"
