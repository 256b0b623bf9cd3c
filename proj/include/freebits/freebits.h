// Copyright 2026 The freebits Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FREEBITS_FREEBITS_H_
#define FREEBITS_FREEBITS_H_

/*
 * C interface to libfreebits.
 *
 * All objects are opaque handles owned by the caller and released with the
 * matching *_free function. Functions return an fb_status; on failure the
 * message is available from fb_last_error() on the same thread until the
 * next failing call. Strings returned through char** are heap allocated and
 * released with fb_string_free().
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(FREEBITS_BUILDING_LIBRARY)
#    define FB_API __declspec(dllexport)
#  else
#    define FB_API __declspec(dllimport)
#  endif
#else
#  define FB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes double as the CLI exit codes. */
typedef enum fb_status {
  FB_OK = 0,
  FB_ERR_INPUT = 2,      /* malformed document, bad argument */
  FB_ERR_UNPROFILED = 3, /* latency dictionary lacks a required entry */
  FB_ERR_VALIDATION = 4, /* invariant violation */
  FB_ERR_INTERNAL = 5
} fb_status;

typedef enum fb_pall {
  FB_PALL_FULL = 0,  /* {2,4,8} x {2,4,8} */
  FB_PALL_LOCKED = 1 /* (2,2), (4,4), (8,8) */
} fb_pall;

typedef enum fb_objective_sense { FB_MAXIMIZE = 0, FB_MINIMIZE = 1 } fb_objective_sense;

typedef struct fb_network fb_network;
typedef struct fb_profile fb_profile;
typedef struct fb_latdict fb_latdict;
typedef struct fb_sensitivity fb_sensitivity;
typedef struct fb_sweep fb_sweep;

typedef struct fb_layer_info {
  const char* id; /* borrowed from the network handle */
  const char* op; /* "conv2d", "dw_conv2d", "pw_conv2d", "linear", "add" */
  int b_in;
  int b_wt;
  int64_t macs;
} fb_layer_info;

typedef struct fb_pareto_point {
  const char* name;
  uint64_t latency;
  double objective;
} fb_pareto_point;

FB_API const char* fb_version(void);
FB_API const char* fb_last_error(void);
FB_API void fb_string_free(char* s);
FB_API fb_status fb_pall_from_name(const char* name, fb_pall* out);

/* Networks */
FB_API fb_status fb_network_parse(const char* json, fb_network** out);
FB_API fb_status fb_network_to_json(const fb_network* net, char** out);
FB_API void fb_network_free(fb_network* net);
FB_API const char* fb_network_name(const fb_network* net);
FB_API size_t fb_network_num_layers(const fb_network* net);
FB_API size_t fb_network_num_layer_types(const fb_network* net);
FB_API fb_status fb_network_layer(const fb_network* net, size_t index, fb_layer_info* out);
FB_API fb_status fb_network_equal(const fb_network* a, const fb_network* b, int* out);
/* first_layer_b_in == 0 leaves the first layer's input precision at b_in. */
FB_API fb_status fb_network_homogeneous(const fb_network* net, int b_in, int b_wt,
                                        int first_layer_b_in, fb_network** out);
/* Copy with a new name and no accuracy annotation. */
FB_API fb_status fb_network_rename(const fb_network* net, const char* name, fb_network** out);
FB_API fb_status fb_layer_type_key(const fb_network* net, size_t index, char** out);

/* Hardware profiles */
FB_API fb_status fb_profile_parse(const char* json, fb_profile** out);
FB_API fb_status fb_profile_builtin(const char* name, fb_profile** out);
FB_API fb_status fb_profile_to_json(const fb_profile* hp, char** out);
FB_API void fb_profile_free(fb_profile* hp);

/* Latency dictionaries */
FB_API fb_status fb_latdict_parse_csv(const char* csv, fb_latdict** out);
FB_API fb_status fb_latdict_generate(const fb_profile* hp, const fb_network* net, fb_pall pall,
                                     fb_latdict** out);
FB_API fb_status fb_latdict_to_csv(const fb_latdict* ld, char** out);
FB_API size_t fb_latdict_size(const fb_latdict* ld);
/* FB_ERR_UNPROFILED when the entry is absent. */
FB_API fb_status fb_latdict_lookup(const fb_latdict* ld, const fb_network* net, size_t layer,
                                   int b_in, int b_wt, uint64_t* cycles);
FB_API void fb_latdict_free(fb_latdict* ld);
FB_API fb_status fb_synth_latency(const fb_profile* hp, const fb_network* net, size_t layer,
                                  int b_in, int b_wt, uint64_t* cycles);

/* Metrics */
FB_API fb_status fb_total_latency(const fb_latdict* ld, const fb_network* net, uint64_t* out);
FB_API fb_status fb_total_bops(const fb_network* net, int64_t* out);
/* Table text and JSON report of every net against the baseline. Either
 * output pointer may be NULL. */
FB_API fb_status fb_evaluate(const fb_latdict* ld, const fb_network* const* nets, size_t n,
                             const fb_network* baseline, char** table, char** json);

/* Free bits */
FB_API fb_status fb_free_bits(const fb_latdict* ld, const fb_network* net, fb_pall pall,
                              fb_network** out);
/* CSV: index,id,old_b_in,old_b_wt,new_b_in,new_b_wt,old_cycles,new_cycles */
FB_API fb_status fb_change_log_csv(const fb_latdict* ld, const fb_network* before,
                                   const fb_network* after, char** out);

/* Search */
FB_API fb_status fb_sensitivity_default(const fb_network* net, fb_sensitivity** out);
FB_API fb_status fb_sensitivity_parse(const char* json, const fb_network* net,
                                      fb_sensitivity** out);
FB_API void fb_sensitivity_free(fb_sensitivity* sens);
/* Writes up to `capacity` values; *count receives the full length. */
FB_API fb_status fb_lambda_spec(const char* spec, double* values, size_t capacity,
                                size_t* count);
FB_API fb_status fb_sweep_run(const fb_network* net, const fb_latdict* ld,
                              const fb_sensitivity* sens, const double* lambdas, size_t n,
                              fb_pall pall, fb_sweep** out);
FB_API size_t fb_sweep_size(const fb_sweep* sweep);
FB_API double fb_sweep_lambda(const fb_sweep* sweep, size_t i);
/* Borrowed; valid until fb_sweep_free. */
FB_API const fb_network* fb_sweep_raw(const fb_sweep* sweep, size_t i);
FB_API const fb_network* fb_sweep_optimized(const fb_sweep* sweep, size_t i);
FB_API fb_status fb_sweep_index_csv(const fb_sweep* sweep, char** out);
FB_API void fb_sweep_free(fb_sweep* sweep);
FB_API fb_status fb_brute_force_best(const fb_network* net, const fb_latdict* ld,
                                     const fb_sensitivity* sens, double lambda, fb_pall pall,
                                     fb_network** out);

/* Indices (into points) of the non-dominated subset, sorted by latency.
 * out_indices must hold n entries. */
FB_API fb_status fb_pareto_front(const fb_pareto_point* points, size_t n,
                                 fb_objective_sense sense, size_t* out_indices,
                                 size_t* out_count);

#ifdef __cplusplus
}
#endif

#endif /* FREEBITS_FREEBITS_H_ */
