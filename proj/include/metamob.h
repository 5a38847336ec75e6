/* metamob C API: mobility simulation, network construction and scaling-law
 * analysis behind opaque handles.
 *
 * Every fallible call returns an mm_status and, on failure, writes a
 * message into the caller-supplied error buffer (always NUL-terminated,
 * possibly truncated). Status codes double as process exit codes:
 * 0 ok, 1 usage/config error, 2 input data error, 3 internal error.
 */
#ifndef METAMOB_H
#define METAMOB_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mm_status {
    MM_OK = 0,
    MM_ERR_CONFIG = 1,
    MM_ERR_DATA = 2,
    MM_ERR_INTERNAL = 3
} mm_status;

typedef struct mm_trajset mm_trajset;   /* canonicalized per-agent trajectories */
typedef struct mm_network mm_network;   /* weighted mobility network */

const char* mm_version(void);

/* Run a simulation described by a JSON config (same schema as the CLI
 * `simulate --config` document; unknown keys are rejected) and write the
 * NDJSON trajectory file, meta header included, to out_path. */
mm_status mm_simulate(const char* config_json, const char* out_path,
                      char* err, size_t err_cap);

/* Load trajectories from an NDJSON or CSV file. column_map may be NULL or a
 * spec like "agent=wallet,t=ts,loc=contract". */
mm_status mm_trajset_read(const char* path, const char* column_map,
                          mm_trajset** out, char* err, size_t err_cap);

mm_status mm_trajset_write(const mm_trajset* ts, const char* path,
                           char* err, size_t err_cap);

/* Location-randomized null model: same agents, event counts and timestamps,
 * locations i.i.d. uniform over the input's location universe. */
mm_status mm_trajset_randomize(const mm_trajset* ts, uint64_t seed,
                               mm_trajset** out, char* err, size_t err_cap);

size_t mm_trajset_agents(const mm_trajset* ts);
size_t mm_trajset_events(const mm_trajset* ts);
/* 1 when the file carried a generator meta header. */
int mm_trajset_generated(const mm_trajset* ts);

void mm_trajset_free(mm_trajset* ts);

mm_status mm_network_build(const mm_trajset* ts, int directed,
                           mm_network** out, char* err, size_t err_cap);

/* Write the two fixed-format CSV tables. */
mm_status mm_network_write_csv(const mm_network* net, const char* edge_path,
                               const char* node_path, char* err, size_t err_cap);

mm_status mm_network_read_csv(const char* edge_path, const char* node_path,
                              int directed, mm_network** out,
                              char* err, size_t err_cap);

size_t mm_network_nodes(const mm_network* net);
size_t mm_network_edges(const mm_network* net);
uint64_t mm_network_transitions(const mm_network* net);

void mm_network_free(mm_network* net);

/* Run every applicable analysis. options_json may be NULL or an object with
 * optional keys: grid {x_min,x_max,y_min,y_max}, window (int), top_fraction,
 * teleport_threshold, curves_dir (string). Unknown keys are rejected. The
 * report JSON is returned through *report_json; free it with mm_free. When
 * net is NULL the network is built from the trajectories. */
mm_status mm_analyze(const mm_trajset* ts, const mm_network* net,
                     const char* options_json, char** report_json,
                     char* err, size_t err_cap);

void mm_free(char* buf);

#ifdef __cplusplus
}
#endif

#endif /* METAMOB_H */
