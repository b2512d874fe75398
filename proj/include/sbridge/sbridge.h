#ifndef SBRIDGE_SBRIDGE_H
#define SBRIDGE_SBRIDGE_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define SB_API __declspec(dllexport)
#else
#define SB_API __attribute__((visibility("default")))
#endif

typedef enum sb_status {
  SB_OK = 0,
  SB_ERR_INVALID_ARGUMENT,
  SB_ERR_DIMENSION_MISMATCH,
  SB_ERR_NEGATIVE_ENTRY,
  SB_ERR_NOT_NORMALIZED,
  SB_ERR_INDEX_OUT_OF_RANGE,
  SB_ERR_NON_POSITIVE_TEMPERATURE,
  SB_ERR_HORIZON_MISMATCH,
  SB_ERR_ZERO_ENTRY,
  SB_ERR_NON_POSITIVE_KERNEL,
  SB_ERR_MAX_ITERATIONS_EXCEEDED,
  SB_ERR_NOT_CONVERGED,
  SB_ERR_INFEASIBLE_SUPPORT,
  SB_ERR_ENUMERATION_BUDGET_EXCEEDED,
  SB_ERR_NO_FEASIBLE_PATH,
  SB_ERR_NOT_PRIMITIVE,
  SB_ERR_ORACLE_SCALE_EXCEEDED,
  SB_ERR_IRRATIONAL_MARGINALS,
  SB_ERR_PARSE,
  SB_ERR_INTERNAL
} sb_status;

SB_API const char* sb_version(void);
SB_API const char* sb_status_name(sb_status status);
/* 0 for SB_OK, 2 for input errors, 3 for computational failures. */
SB_API int sb_status_exit_code(sb_status status);
/* Message of the last failure on the calling thread; "" if none. */
SB_API const char* sb_last_error(void);

/* ---- graphs (node numbers are 1-based) ---- */

typedef struct sb_graph sb_graph;

SB_API sb_status sb_graph_create(size_t node_count, sb_graph** out);
/* Text "src dst [length]" lines or a JSON graph document. */
SB_API sb_status sb_graph_parse(const char* text, sb_graph** out);
SB_API sb_status sb_graph_load(const char* path, sb_graph** out);
SB_API sb_status sb_graph_add_edge(sb_graph* graph, size_t src, size_t dst, double length);
SB_API sb_status sb_graph_set_length(sb_graph* graph, size_t src, size_t dst, double length);
SB_API size_t sb_graph_node_count(const sb_graph* graph);
/* 1-based index of the node with this label (or number). */
SB_API sb_status sb_graph_node_index(const sb_graph* graph, const char* label, size_t* index);
SB_API size_t sb_graph_edge_count(const sb_graph* graph);
SB_API void sb_graph_destroy(sb_graph* graph);

/* ---- reports ---- */

typedef struct sb_report sb_report;

/* JSON document, numbers at 12 significant digits. Owned by the report. */
SB_API const char* sb_report_json(const sb_report* report);
/* Named CSV export, or NULL when the report has none by that name. */
SB_API const char* sb_report_csv(const sb_report* report, const char* name);
/* The export a command writes for --csv. */
SB_API const char* sb_report_primary_csv(const sb_report* report);
/* Full-precision row-major matrix by name; data stays owned by the report. */
SB_API sb_status sb_report_matrix(const sb_report* report, const char* name, size_t* rows, size_t* cols,
                                  const double** data);
SB_API void sb_report_destroy(sb_report* report);

/* ---- scaling ---- */

typedef struct sb_solver_options {
  double tol;    /* Hilbert step; default 1e-12 */
  long max_iter; /* default 100000 */
} sb_solver_options;

SB_API void sb_solver_options_init(sb_solver_options* options);

/* kernel is row-major rows x cols. Matrices: "coupling"; CSV: "coupling". */
SB_API sb_status sb_scale(const double* kernel, size_t rows, size_t cols, const double* p, size_t p_count,
                          const double* q, size_t q_count, const sb_solver_options* options, sb_report** out);

/* ---- routing ---- */

typedef enum sb_prior { SB_PRIOR_RUELLE_BOWEN = 0, SB_PRIOR_BOLTZMANN = 1 } sb_prior;

typedef struct sb_route_options {
  size_t source;  /* 1-based */
  size_t sink;    /* 1-based */
  size_t horizon;
  sb_prior prior;
  double temperature;   /* Boltzmann only; default 1 */
  const double* sweep;  /* when non-NULL, one Boltzmann report per temperature */
  size_t sweep_count;
  int include_paths; /* nonzero: ranked path table in the report */
  sb_solver_options solver;
} sb_route_options;

SB_API void sb_route_options_init(sb_route_options* options);
/* Matrices: "flow" (single run); CSV: "flow", "paths". */
SB_API sb_status sb_route(const sb_graph* graph, const sb_route_options* options, sb_report** out);

/* ---- general bridges ---- */

typedef struct sb_bridge_options {
  size_t horizon;
  sb_prior prior; /* kernel of a graph prior: adjacency or Boltzmann */
  double temperature;
  int include_paths;
  sb_solver_options solver;
} sb_bridge_options;

SB_API void sb_bridge_options_init(sb_bridge_options* options);
/* Prior: unit initial weights and N copies of the graph kernel. */
SB_API sb_status sb_bridge(const sb_graph* graph, const double* nu0, size_t nu0_count, const double* nuN,
                           size_t nuN_count, const sb_bridge_options* options, sb_report** out);
/* Same with an explicit nonnegative n x n step kernel (row-major). */
SB_API sb_status sb_bridge_kernel(const double* kernel, size_t rows, size_t cols, const double* nu0,
                                  size_t nu0_count, const double* nuN, size_t nuN_count,
                                  const sb_bridge_options* options, sb_report** out);

/* ---- 1-D entropic interpolation ---- */

typedef struct sb_density sb_density;

SB_API sb_status sb_density_gaussian(double mean, double variance, sb_density** out);
SB_API sb_status sb_density_table(const double* x, const double* value, size_t count, sb_density** out);
/* Two-column "x value" text. */
SB_API sb_status sb_density_parse(const char* text, sb_density** out);
SB_API void sb_density_destroy(sb_density* density);

typedef struct sb_interp_options {
  double a, b;  /* grid interval; used when m > 0 */
  size_t m;     /* 0: width rule around the densities with 200 points */
  double epsilon;
  const double* eps_sweep; /* decreasing; when non-NULL, a cost curve is added */
  size_t eps_count;
  const double* times; /* NULL: 11 equispaced points */
  size_t time_count;
  sb_solver_options solver;
} sb_interp_options;

SB_API void sb_interp_options_init(sb_interp_options* options);
/* Matrices: "density" (times x m); CSV: "density" (t,x,rho), "cost_curve". */
SB_API sb_status sb_interp(const sb_density* rho0, const sb_density* rho1, const sb_interp_options* options,
                           sb_report** out);

/* ---- spectral data ---- */

/* temperature <= 0: adjacency only. Matrices: "transition". */
SB_API sb_status sb_spectral(const sb_graph* graph, double temperature, sb_report** out);

#ifdef __cplusplus
}
#endif

#endif
