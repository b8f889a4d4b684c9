#include "gausstat/gausstat.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "gausstat/pipeline.hpp"

using namespace gausstat;

struct gs_context {
  RunConfig cfg;
};

namespace {

thread_local std::string g_last_error;

gs_status status_of(ErrorKind k) {
  switch (k) {
  case ErrorKind::Validation: return GS_ERR_VALIDATION;
  case ErrorKind::UnsupportedOrder: return GS_ERR_UNSUPPORTED_ORDER;
  case ErrorKind::UndefinedCorrelation: return GS_ERR_UNDEFINED_CORRELATION;
  case ErrorKind::InsufficientData: return GS_ERR_INSUFFICIENT_DATA;
  case ErrorKind::Infeasible: return GS_ERR_INFEASIBLE;
  case ErrorKind::Inconsistent: return GS_ERR_INCONSISTENT;
  case ErrorKind::SectorMismatch: return GS_ERR_SECTOR_MISMATCH;
  case ErrorKind::Truncation: return GS_ERR_TRUNCATION;
  case ErrorKind::Numerical: return GS_ERR_NUMERICAL;
  }
  return GS_ERR_INTERNAL;
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (p) std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

// Runs f, mapping exceptions to status codes and the thread-local message.
template <class F>
gs_status guard(F&& f) {
  try {
    g_last_error.clear();
    f();
    return GS_OK;
  } catch (const Error& e) {
    g_last_error = std::string(error_kind_name(e.kind())) + ": " + e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return GS_ERR_NUMERICAL;
  } catch (const std::exception& e) {
    g_last_error = std::string("internal: ") + e.what();
    return GS_ERR_INTERNAL;
  }
}

const std::string& need(const char* s, const char* what) {
  static thread_local std::string buf;
  if (!s) throw Error(ErrorKind::Validation, std::string(what) + " is NULL");
  buf = s;
  return buf;
}

void emit(char** out, const std::string& s) {
  if (!out) throw Error(ErrorKind::Validation, "output pointer is NULL");
  *out = dup(s);
  if (!*out) throw std::bad_alloc();
}

const RunConfig& cfg_of(const gs_context* ctx) {
  if (!ctx) throw Error(ErrorKind::Validation, "context is NULL");
  return ctx->cfg;
}

} // namespace

extern "C" {

const char* gs_version(void) { return "1.0.0"; }

gs_status gs_context_new(const char* config_json, gs_context** out) {
  return guard([&] {
    if (!out) throw Error(ErrorKind::Validation, "output pointer is NULL");
    auto* c = new gs_context;
    try {
      c->cfg = config_json ? RunConfig::from_json(parse_json(config_json)) : RunConfig{};
    } catch (...) {
      delete c;
      throw;
    }
    *out = c;
  });
}

void gs_context_free(gs_context* ctx) { delete ctx; }

gs_status gs_context_config(const gs_context* ctx, char** out_json) {
  return guard([&] { emit(out_json, cfg_of(ctx).to_json().dump(2)); });
}

gs_status gs_simulate(const gs_context* ctx, const char* params_json, char** out_json) {
  return guard([&] { emit(out_json, cmd_simulate(parse_json(need(params_json, "params")), cfg_of(ctx)).dump(2)); });
}

gs_status gs_classify(const gs_context* ctx, const char* measurements_json, char** out_json) {
  return guard(
      [&] { emit(out_json, cmd_classify(parse_json(need(measurements_json, "measurements")), cfg_of(ctx)).dump(2)); });
}

gs_status gs_reconstruct(const gs_context* ctx, const char* const* inputs, size_t n_inputs, const char* sector,
                         char** out_json) {
  return guard([&] {
    std::vector<json> docs;
    for (size_t k = 0; k < n_inputs; ++k) docs.push_back(parse_json(need(inputs ? inputs[k] : nullptr, "input")));
    emit(out_json, cmd_reconstruct(docs, sector ? sector : "auto", cfg_of(ctx)).dump(2));
  });
}

gs_status gs_verify(const gs_context* ctx, const char* params_json, char** out_json) {
  return guard([&] { emit(out_json, cmd_verify(parse_json(need(params_json, "params")), cfg_of(ctx)).dump(2)); });
}

gs_status gs_curves(const char* relation, double g2_from, double g2_to, int points, char** out_csv) {
  return guard([&] { emit(out_csv, cmd_curves(need(relation, "relation"), g2_from, g2_to, points)); });
}

gs_status gs_bucket(const gs_context* ctx, const char* input_json, char** out_json) {
  return guard([&] { emit(out_json, cmd_bucket(parse_json(need(input_json, "input")), cfg_of(ctx)).dump(2)); });
}

const char* gs_last_error(void) { return g_last_error.c_str(); }

int gs_exit_code(gs_status s) {
  switch (s) {
  case GS_OK: return 0;
  case GS_ERR_VALIDATION:
  case GS_ERR_UNSUPPORTED_ORDER:
  case GS_ERR_INSUFFICIENT_DATA: return exit_code(ErrorKind::Validation);
  case GS_ERR_UNDEFINED_CORRELATION:
  case GS_ERR_INFEASIBLE:
  case GS_ERR_INCONSISTENT:
  case GS_ERR_SECTOR_MISMATCH: return exit_code(ErrorKind::Inconsistent);
  default: return exit_code(ErrorKind::Numerical);
  }
}

void gs_string_free(char* s) { std::free(s); }

} // extern "C"
