#include "hstn/hstn.h"

#include <cstring>
#include <fstream>
#include <memory>
#include <new>
#include <sstream>
#include <string>

#include <json.hpp>

#include "experiments.hpp"
#include "scenario.hpp"

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

// Runs fn, translating exceptions into status codes + the thread-local
// error message.
template <typename Fn>
int guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    return fn();
  } catch (const hstn::ConfigError& e) {
    set_error(e.what());
    return HSTN_ERR_CONFIG;
  } catch (const std::invalid_argument& e) {
    set_error(e.what());
    return HSTN_ERR_INVALID;
  } catch (const std::bad_alloc&) {
    set_error("out of memory");
    return HSTN_ERR_INTERNAL;
  } catch (const std::exception& e) {
    set_error(e.what());
    return HSTN_ERR_INTERNAL;
  } catch (...) {
    set_error("unknown error");
    return HSTN_ERR_INTERNAL;
  }
}

int write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    set_error("io error: cannot open '" + path + "' for writing");
    return HSTN_ERR_IO;
  }
  out << text;
  out.flush();
  if (!out) {
    set_error("io error: failed writing '" + path + "'");
    return HSTN_ERR_IO;
  }
  return HSTN_OK;
}

constexpr std::uint64_t kGeomTag = 0x47454f4d;
constexpr std::uint64_t kShadowTag = 0x53484144;

}  // namespace

struct hstn_scenario_s {
  hstn::ScenarioConfig cfg;
};

struct hstn_result_s {
  hstn::ScenarioConfig cfg;
  hstn::LargeScaleState ls;
  hstn::PipelineResult pipeline;
};

extern "C" {

int hstn_scenario_default(hstn_scenario** out) {
  return guarded([&] {
    if (!out) {
      set_error("out pointer is null");
      return static_cast<int>(HSTN_ERR_INVALID);
    }
    *out = new hstn_scenario_s{hstn::default_config()};
    return static_cast<int>(HSTN_OK);
  });
}

int hstn_scenario_from_json(const char* json_text, hstn_scenario** out) {
  return guarded([&] {
    if (!json_text || !out) {
      set_error("argument is null");
      return static_cast<int>(HSTN_ERR_INVALID);
    }
    *out = new hstn_scenario_s{hstn::config_from_json(json_text)};
    return static_cast<int>(HSTN_OK);
  });
}

int hstn_scenario_from_file(const char* path, hstn_scenario** out) {
  return guarded([&] {
    if (!path || !out) {
      set_error("argument is null");
      return static_cast<int>(HSTN_ERR_INVALID);
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      set_error("io error: cannot open '" + std::string(path) + "'");
      return static_cast<int>(HSTN_ERR_IO);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    *out = new hstn_scenario_s{hstn::config_from_json(ss.str())};
    return static_cast<int>(HSTN_OK);
  });
}

int hstn_scenario_to_json(const hstn_scenario* s, char** json_out) {
  return guarded([&] {
    if (!s || !json_out) {
      set_error("argument is null");
      return static_cast<int>(HSTN_ERR_INVALID);
    }
    *json_out = dup_string(hstn::config_to_json(s->cfg));
    return static_cast<int>(HSTN_OK);
  });
}

void hstn_scenario_free(hstn_scenario* s) { delete s; }

int hstn_solve(const hstn_scenario* s, uint64_t seed, hstn_result** out) {
  return guarded([&] {
    if (!s || !out) {
      set_error("argument is null");
      return static_cast<int>(HSTN_ERR_INVALID);
    }
    auto res = std::make_unique<hstn_result_s>();
    res->cfg = s->cfg;
    hstn::RngStream geom_rng = hstn::RngStream(seed).split(kGeomTag);
    const hstn::Geometry geom = hstn::sample_geometry(s->cfg, s->cfg.region, geom_rng);
    hstn::RngStream shadow_rng = hstn::RngStream(seed).split(kShadowTag, 0);
    res->ls = hstn::derive_large_scale(geom, s->cfg, shadow_rng);
    res->pipeline = hstn::algorithm1(res->ls, s->cfg);
    *out = res.release();
    return static_cast<int>(HSTN_OK);
  });
}

int hstn_result_num_users(const hstn_result* r, int* out) {
  return guarded([&] {
    if (!r || !out) {
      set_error("argument is null");
      return static_cast<int>(HSTN_ERR_INVALID);
    }
    *out = r->cfg.n_pairs;
    return static_cast<int>(HSTN_OK);
  });
}

int hstn_result_sum_rate(const hstn_result* r, double* out) {
  return guarded([&] {
    if (!r || !out) {
      set_error("argument is null");
      return static_cast<int>(HSTN_ERR_INVALID);
    }
    *out = r->pipeline.sum_rate;
    return static_cast<int>(HSTN_OK);
  });
}

int hstn_result_assignment(const hstn_result* r, int* channels, size_t len) {
  return guarded([&] {
    if (!r || !channels) {
      set_error("argument is null");
      return static_cast<int>(HSTN_ERR_INVALID);
    }
    const auto& perm = r->pipeline.assignment.perm;
    if (len < perm.size()) {
      set_error("channels buffer too small");
      return static_cast<int>(HSTN_ERR_INVALID);
    }
    for (std::size_t i = 0; i < perm.size(); ++i) channels[i] = perm[i];
    return static_cast<int>(HSTN_OK);
  });
}

int hstn_result_to_json(const hstn_result* r, char** json_out) {
  return guarded([&] {
    if (!r || !json_out) {
      set_error("argument is null");
      return static_cast<int>(HSTN_ERR_INVALID);
    }
    *json_out = dup_string(hstn::solve_report_json(r->cfg, r->ls, r->pipeline));
    return static_cast<int>(HSTN_OK);
  });
}

void hstn_result_free(hstn_result* r) { delete r; }

int hstn_sweep_run(const char* spec_json, uint64_t seed, int threads,
                   const char* out_csv_path) {
  return guarded([&] {
    if (!spec_json || !out_csv_path) {
      set_error("argument is null");
      return static_cast<int>(HSTN_ERR_INVALID);
    }
    const hstn::ExperimentSpec spec = hstn::spec_from_json(spec_json);
    const hstn::SweepResult result = hstn::run_sweep(spec, seed, threads);
    return write_text_file(out_csv_path, hstn::sweep_to_csv(result));
  });
}

int hstn_sweep_to_string(const char* spec_json, uint64_t seed, int threads, char** csv_out) {
  return guarded([&] {
    if (!spec_json || !csv_out) {
      set_error("argument is null");
      return static_cast<int>(HSTN_ERR_INVALID);
    }
    const hstn::ExperimentSpec spec = hstn::spec_from_json(spec_json);
    const hstn::SweepResult result = hstn::run_sweep(spec, seed, threads);
    *csv_out = dup_string(hstn::sweep_to_csv(result));
    return static_cast<int>(HSTN_OK);
  });
}

int hstn_validate_approx(const char* spec_json, uint64_t seed, int threads,
                         const char* out_csv_path, char** summary_json_out) {
  return guarded([&] {
    if (!spec_json || !out_csv_path) {
      set_error("argument is null");
      return static_cast<int>(HSTN_ERR_INVALID);
    }
    const hstn::ExperimentSpec spec = hstn::spec_from_json(spec_json);
    const hstn::ValidationReport report = hstn::validate_approx(spec, seed, threads);
    const int status = write_text_file(out_csv_path, hstn::validation_to_csv(report));
    if (status != HSTN_OK) return status;
    if (summary_json_out) {
      nlohmann::json summary;
      summary["rows"] = report.rows.size();
      summary["median_rel_gap"] = report.median_gap;
      summary["max_rel_gap"] = report.max_gap;
      *summary_json_out = dup_string(summary.dump(2));
    }
    return static_cast<int>(HSTN_OK);
  });
}

const char* hstn_last_error(void) { return g_last_error.c_str(); }

const char* hstn_status_name(int status) {
  switch (status) {
    case HSTN_OK: return "ok";
    case HSTN_ERR_CONFIG: return "config error";
    case HSTN_ERR_IO: return "io error";
    case HSTN_ERR_INVALID: return "invalid argument";
    case HSTN_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void hstn_string_free(char* s) { delete[] s; }

const char* hstn_version(void) { return "1.0.0"; }

}  // extern "C"
