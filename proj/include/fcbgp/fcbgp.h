#ifndef FCBGP_FCBGP_H
#define FCBGP_FCBGP_H

#include <stddef.h>
#include <stdint.h>

#if defined(FCBGP_BUILDING_LIBRARY)
#define FCBGP_API __attribute__((visibility("default")))
#else
#define FCBGP_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fcbgp_status {
    FCBGP_OK = 0,
    FCBGP_E_INVALID_ARGUMENT = 1,
    FCBGP_E_PARSE = 2,
    FCBGP_E_IO = 3,
    FCBGP_E_MALFORMED = 4,
    FCBGP_E_DATA = 5,       /* unknown AS, ownership, conflict, degenerate input */
    FCBGP_E_BUDGET = 6,     /* simulation did not settle within its budget */
    FCBGP_E_VIOLATION = 7,  /* run finished but an expectation or invariant failed */
    FCBGP_E_INTERNAL = 8
} fcbgp_status;

/* Message of the last failing call on this thread; never NULL. */
FCBGP_API const char* fcbgp_last_error(void);
FCBGP_API const char* fcbgp_status_name(fcbgp_status status);
/* Frees strings returned through char** out-parameters. */
FCBGP_API void fcbgp_string_free(char* s);

typedef struct fcbgp_trust fcbgp_trust;

/* Trust file lines: asn|prefix,prefix|deployed|pubkey-hex or auto or -. */
FCBGP_API fcbgp_status fcbgp_trust_load(const char* path, uint64_t seed, fcbgp_trust** out);
FCBGP_API void fcbgp_trust_free(fcbgp_trust* trust);
FCBGP_API size_t fcbgp_trust_size(const fcbgp_trust* trust);
FCBGP_API fcbgp_status fcbgp_trust_owner(const fcbgp_trust* trust, const char* prefix, uint32_t* asn);
/* 1 deployed, 0 legacy or unknown. */
FCBGP_API int fcbgp_trust_is_deployed(const fcbgp_trust* trust, uint32_t asn);

/* Field and hex dump of a fixture file. */
FCBGP_API fcbgp_status fcbgp_inspect_file(const char* path, char** dump);

typedef struct fcbgp_sim_output {
    char* trace;       /* one event per line */
    char* summary;     /* final routes, rules, packets, views; violations last */
    char* digest;      /* hex SHA-256 of the trace */
    size_t violations;
} fcbgp_sim_output;

/* Runs a scenario file with the given seed. sync_period > 0 replaces the
   scenario's consistency-check period. Returns FCBGP_E_VIOLATION when any
   expectation failed; output is filled in that case too. */
FCBGP_API fcbgp_status fcbgp_simulate_file(const char* path, uint64_t seed, long sync_period,
                                           fcbgp_sim_output* out);
FCBGP_API void fcbgp_sim_output_free(fcbgp_sim_output* out);

typedef struct fcbgp_metrics_config {
    const char* as_rel_path;     /* NULL: synthetic scale-free topology */
    const char* prefix2as_path;  /* optional with as_rel_path */
    size_t synthetic_ases;
    size_t origins;              /* destination ASes sampled for monitored paths */
    const double* rates;
    size_t rate_count;
    const unsigned* hops;        /* attacker distances L */
    size_t hop_count;
    uint64_t seed;
    const char* output_dir;
} fcbgp_metrics_config;

/* Writes hijacking_rate.csv, breakdown_hijacking_rate.csv and
   filtration_rate.csv into output_dir. Returns FCBGP_E_VIOLATION when
   dominance or monotonicity fails on the computed curves. */
FCBGP_API fcbgp_status fcbgp_metrics_run(const fcbgp_metrics_config* config, char** report);

/* Churn statistics over `source|prefix|asn asn ...` records as key=value lines. */
FCBGP_API fcbgp_status fcbgp_churn_file(const char* path, char** report);

#ifdef __cplusplus
}
#endif

#endif
