#ifndef CURESEM_H
#define CURESEM_H

/* C interface to the cure-rate estimation engine. All entry points return
 * CURESEM_OK or an error code; curesem_last_error() describes the most recent
 * failure on the calling thread. Results are JSON documents. */

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#define CURESEM_OK 0
#define CURESEM_USAGE_ERROR 2
#define CURESEM_NUMERIC_ERROR 3

typedef struct curesem_dataset curesem_dataset;
typedef struct curesem_result curesem_result;

const char* curesem_version(void);

/* message for the last failing call on this thread; empty if none */
const char* curesem_last_error(void);

/* delimited text with a header: time, status, x_* and z_* columns */
int curesem_dataset_load(const char* path, curesem_dataset** out);
int curesem_dataset_rows(const curesem_dataset* data, size_t* out);
void curesem_dataset_free(curesem_dataset* data);

/* config: JSON object with algo/iters/burnin/mle-rule/phi-grid/seed/eps/
 * mc-samples/init/cure-profiles; result: FitReport JSON */
int curesem_fit(const curesem_dataset* data, const char* config_json,
                curesem_result** out);

/* scenario: scenario JSON; config: JSON with algos/replicates/jobs/seed;
 * result: {files: [{suffix, content}...]} */
int curesem_simulate(const char* scenario_json, const char* config_json,
                     curesem_result** out);

/* fit_json: a FitReport; config: JSON with seed/replicates;
 * result: {ks, files: [{suffix, content}...]} */
int curesem_diagnose(const curesem_dataset* data, const char* fit_json,
                     const char* config_json, curesem_result** out);

/* NUL-terminated JSON document; owned by the result */
const char* curesem_result_json(const curesem_result* result);
void curesem_result_free(curesem_result* result);

#ifdef __cplusplus
}
#endif

#endif /* CURESEM_H */
