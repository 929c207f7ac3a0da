/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef RISKFIELD_H
#define RISKFIELD_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Result codes. `RF_STATUS_OK` is zero.
 */
typedef enum RfStatus {
  RF_STATUS_OK = 0,
  RF_STATUS_NULL_POINTER = 1,
  RF_STATUS_INVALID_UTF8 = 2,
  RF_STATUS_IO = 3,
  RF_STATUS_PARSE = 4,
  RF_STATUS_VALIDATION = 5,
  RF_STATUS_PROTOCOL = 6,
  RF_STATUS_TIMEOUT = 7,
  RF_STATUS_DIMENSION_MISMATCH = 8,
  RF_STATUS_EMPTY_CONTROL_SET = 9,
  RF_STATUS_INVALID_MODE = 10,
  RF_STATUS_UNKNOWN_PARAMETER = 11,
  RF_STATUS_IMAGE = 12,
  RF_STATUS_OUT_OF_RANGE = 13,
  RF_STATUS_PANIC = 14,
} RfStatus;

typedef enum RfMode {
  RF_MODE_OURS = 0,
  RF_MODE_NO_VLM = 1,
  RF_MODE_BASELINE = 2,
} RfMode;

typedef enum RfTermination {
  RF_TERMINATION_GOAL = 0,
  RF_TERMINATION_HAZARD_CONTACT = 1,
  RF_TERMINATION_TIMEOUT = 2,
  RF_TERMINATION_OFF_ROAD = 3,
} RfTermination;

/**
 * Opaque risk-map handle.
 */
typedef struct RfRiskMap RfRiskMap;

/**
 * Opaque scenario handle.
 */
typedef struct RfScenario RfScenario;

/**
 * Motorcycle state: position (m), heading (rad), speed (m/s), steering
 * angle (rad) and lean angle (rad).
 */
typedef struct RfState {
  double x;
  double y;
  double theta;
  double v;
  double delta;
  double phi;
} RfState;

/**
 * Acceleration (m/s²) and steering rate (rad/s).
 */
typedef struct RfControl {
  double a;
  double ddelta;
} RfControl;

/**
 * Episode outcome. `exposure_distance` is meaningful only when
 * `has_exposure` is true.
 */
typedef struct RfEpisodeSummary {
  bool success;
  bool reached_goal;
  bool has_exposure;
  double exposure_distance;
  uint64_t steps;
  enum RfTermination termination;
} RfEpisodeSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread. Empty when no call
 * has failed. The pointer stays valid until the next failing call on the
 * same thread.
 */
const char *rf_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *rf_version(void);

/**
 * Loads and validates a scenario file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a writable pointer.
 */
enum RfStatus rf_scenario_load(const char *path, struct RfScenario **out);

/**
 * Parses and validates a scenario from JSON text.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a writable pointer.
 */
enum RfStatus rf_scenario_from_json(const char *json, struct RfScenario **out);

/**
 * # Safety
 * `scenario` must come from `rf_scenario_load`/`rf_scenario_from_json` and
 * not be used afterwards. Null is ignored.
 */
void rf_scenario_free(struct RfScenario *scenario);

/**
 * Number of hazards; 0 for a null handle.
 *
 * # Safety
 * `scenario` must be null or a live handle.
 */
uintptr_t rf_scenario_hazard_count(const struct RfScenario *scenario);

/**
 * # Safety
 * `scenario` must be a live handle and `out` writable.
 */
enum RfStatus rf_scenario_start(const struct RfScenario *scenario, struct RfState *out);

/**
 * Risk map seen from `state` with ground-truth perception.
 *
 * # Safety
 * `scenario` and `state` must be valid pointers and `out` writable.
 */
enum RfStatus rf_risk_map_build(const struct RfScenario *scenario,
                                const struct RfState *state,
                                enum RfMode mode,
                                struct RfRiskMap **out);

/**
 * # Safety
 * `map` must come from `rf_risk_map_build` and not be used afterwards.
 * Null is ignored.
 */
void rf_risk_map_free(struct RfRiskMap *map);

/**
 * # Safety
 * `map` must be null or a live handle.
 */
uintptr_t rf_risk_map_width(const struct RfRiskMap *map);

/**
 * # Safety
 * `map` must be null or a live handle.
 */
uintptr_t rf_risk_map_height(const struct RfRiskMap *map);

/**
 * Risk at pixel column `m`, row `n`.
 *
 * # Safety
 * `map` must be a live handle and `out` writable.
 */
enum RfStatus rf_risk_map_get(const struct RfRiskMap *map, uintptr_t m, uintptr_t n, double *out);

/**
 * Copies the map row-major into `buf`, which must hold `width * height`
 * values.
 *
 * # Safety
 * `buf` must be writable for `len` doubles.
 */
enum RfStatus rf_risk_map_copy(const struct RfRiskMap *map, double *buf, uintptr_t len);

/**
 * Best control from `state` against `map` toward the scenario goal.
 *
 * # Safety
 * All pointers must be valid; `out` writable.
 */
enum RfStatus rf_plan(const struct RfScenario *scenario,
                      const struct RfState *state,
                      const struct RfRiskMap *map,
                      struct RfControl *out);

/**
 * Runs one closed-loop episode with the scenario's seeded perception noise.
 *
 * # Safety
 * `scenario` must be a live handle and `out` writable.
 */
enum RfStatus rf_run_episode(const struct RfScenario *scenario,
                             enum RfMode mode,
                             uint64_t seed,
                             struct RfEpisodeSummary *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RISKFIELD_H */
