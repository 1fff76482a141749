/* C interface to liedepth. All functions return an ld_status; on failure
 * ld_last_error() describes the problem for the calling thread. Strings
 * returned through char** are heap allocated and released with
 * ld_free_string. Handles are released with their matching ld_*_free. */
#ifndef LIEDEPTH_H
#define LIEDEPTH_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(LIEDEPTH_BUILDING_LIBRARY)
#    define LD_API __declspec(dllexport)
#  else
#    define LD_API __declspec(dllimport)
#  endif
#else
#  define LD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values match the CLI exit codes. */
typedef enum ld_status {
    LD_OK = 0,
    LD_ERR_VALIDATION = 2,
    LD_ERR_NUMERICAL_GUARD = 3,
    LD_ERR_INVARIANT = 4
} ld_status;

typedef struct ld_algebra ld_algebra;
typedef struct ld_ssm ld_ssm;
typedef struct ld_path ld_path;
typedef struct ld_group ld_group;
typedef struct ld_cascade ld_cascade;

LD_API const char* ld_version(void);
LD_API const char* ld_last_error(void);
LD_API void ld_free_string(char* s);

/* Span tolerance used by closure and classification (default 1e-9). */
LD_API ld_status ld_set_default_tolerance(double tol);
LD_API double ld_default_tolerance(void);

/* ---- algebras ---- */
LD_API ld_status ld_algebra_from_file(const char* path, ld_algebra** out);
LD_API ld_status ld_algebra_from_text(const char* json, ld_algebra** out);
/* `count` row-major n x n matrices laid out back to back. */
LD_API ld_status ld_algebra_from_generators(int n, size_t count, const double* data, ld_algebra** out);
/* so3, sl2, diagonal, upper_triangular_2, upper_triangular_3, strictly_upper_3, strictly_upper_4. */
LD_API ld_status ld_algebra_builtin(const char* name, ld_algebra** out);
LD_API void ld_algebra_free(ld_algebra* a);
LD_API ld_status ld_algebra_generator_count(const ld_algebra* a, size_t* count);
LD_API ld_status ld_algebra_dimension(const ld_algebra* a, size_t* dim);
/* {"dim", "class", "derived_length", "nilpotency_class", "derived_dims", "lower_central_dims", ...} */
LD_API ld_status ld_algebra_classify_json(const ld_algebra* a, char** json);

/* ---- systems and paths ---- */
LD_API ld_status ld_ssm_from_file(const char* path, ld_ssm** out);
LD_API ld_status ld_ssm_from_text(const char* json, ld_ssm** out);
/* Homogeneous system on the algebra's generators, h0 = e_0. */
LD_API ld_status ld_ssm_from_algebra(const ld_algebra* a, ld_ssm** out);
LD_API void ld_ssm_free(ld_ssm* s);
LD_API ld_status ld_ssm_dimension(const ld_ssm* s, int* n);
LD_API ld_status ld_ssm_is_restricted(const ld_ssm* s, int* restricted);

/* Symbol names resolve against the SSM alphabet. */
LD_API ld_status ld_path_from_file(const char* path, const ld_ssm* alphabet, ld_path** out);
LD_API ld_status ld_path_from_text(const char* json, const ld_ssm* alphabet, ld_path** out);
LD_API void ld_path_free(ld_path* p);

/* h(T) written to state[0..n-1]. */
LD_API ld_status ld_simulate_state(const ld_ssm* s, const ld_path* p, double* state, size_t capacity);
/* Row-major n x n. */
LD_API ld_status ld_transition_matrix(const ld_ssm* s, const ld_path* p, double* phi, size_t capacity);
/* Phi, Omega_1..3, masses; truncated flow error when order > 0. */
LD_API ld_status ld_flow_json(const ld_ssm* s, const ld_path* p, int order, char** json);
LD_API ld_status ld_fourpath_json(const ld_ssm* s, const ld_path* prefix1, const ld_path* prefix2, const ld_path* xy,
                                  char** json);

typedef struct ld_simerror_options {
    double horizon;
    size_t samples;
    uint64_t seed;
    unsigned jobs;
    double duration_unit; /* 0 selects 0.25 */
    double mass_bound;    /* <= 0 disables rejection */
} ld_simerror_options;

LD_API ld_status ld_simerror_json(const ld_ssm* target, const ld_ssm* approx, const ld_simerror_options* options,
                                  char** json);

/* ---- cascade ---- */
LD_API ld_status ld_cascade_decompose(const ld_ssm* s, ld_cascade** out);
LD_API void ld_cascade_free(ld_cascade* c);
LD_API ld_status ld_cascade_depth(const ld_cascade* c, int* depth);
LD_API ld_status ld_cascade_json(const ld_cascade* c, char** json);
LD_API ld_status ld_cascade_from_json(const char* json, ld_cascade** out);
/* Random unit-horizon paths (seeded); step <= 0 selects 1/256. */
LD_API ld_status ld_cascade_verify_json(const ld_cascade* c, size_t paths, uint64_t seed, double step, unsigned jobs,
                                        char** json);

/* CSV rows plus a fit block; eps grid log-spaced over [eps_lo, eps_hi]. */
LD_API ld_status ld_scaling_csv(const ld_algebra* a, const int* orders, size_t order_count, double eps_lo,
                                double eps_hi, size_t points, size_t paths_per_point, uint64_t seed, unsigned jobs,
                                char** csv);

/* ---- groups ---- */
LD_API ld_status ld_group_create(const char* name, ld_group** out);
LD_API void ld_group_free(ld_group* g);
LD_API ld_status ld_group_order(const ld_group* g, int* order);
LD_API ld_status ld_group_compose_word(const ld_group* g, const int* tokens, size_t length, int* result);
LD_API ld_status ld_group_classify_json(const ld_group* g, char** json);
LD_API ld_status ld_wordgen_jsonl(const ld_group* g, size_t length, size_t count, uint64_t seed, unsigned jobs,
                                  int bos, char** jsonl);
/* Re-derives every label by prefix folding; counts records that disagree. */
LD_API ld_status ld_wordgen_verify(const ld_group* g, const char* jsonl, int bos, size_t* records, size_t* mismatches);
LD_API ld_status ld_rotgen_jsonl(size_t length, size_t count, uint64_t seed, unsigned jobs, char** jsonl);
LD_API ld_status ld_rotgen_verify(const char* jsonl, double tol, size_t* records, size_t* mismatches);

/* ---- Lyndon words ---- */
LD_API ld_status ld_depth_bound(long long T, int* depth);
/* Decimal strings: values can exceed 64 bits. */
LD_API ld_status ld_witt_dimension(int n, int T, char** decimal);
LD_API ld_status ld_lyndon_table_csv(int n, int T, char** csv);
/* {"word", "lyndon", "factors": [...], "brackets": [...]} */
LD_API ld_status ld_lyndon_factorize_json(const int* letters, size_t length, char** json);

#ifdef __cplusplus
}
#endif

#endif
