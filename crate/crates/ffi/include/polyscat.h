#ifndef POLYSCAT_H
#define POLYSCAT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes mirroring the CLI exit-code contract.
 */
typedef enum PsStatus {
  PsOk = 0,
  PsUsage = 1,
  PsParse = 2,
  PsInvariant = 3,
  PsCompute = 4,
  PsNullArgument = 5,
  PsInvalidUtf8 = 6,
} PsStatus;

/**
 * An opaque, validated scene.
 */
typedef struct PsScene PsScene;

/**
 * Run options; zero or negative numeric fields select the documented
 * defaults.
 */
typedef struct PsRunOptions {
  uint64_t seed;
  /**
   * Sphere-grid density per great circle; 0 selects 256.
   */
  uint32_t grid_density;
  /**
   * Trace iteration cap; 0 selects 32.
   */
  uint32_t max_iters;
  /**
   * Trace fill resolution; <= 0 selects the scene-adapted default.
   */
  double resolution;
  /**
   * Vanishing-threshold override; <= 0 keeps 1e-9.
   */
  double tolerance;
} PsRunOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the most recent error on this thread; empty when none. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *ps_last_error(void);

/**
 * Default run options.
 */
struct PsRunOptions ps_run_options_default(void);

/**
 * Parses and validates a scene from JSON text.
 *
 * # Safety
 * `json` must be a NUL-terminated string valid for the duration of the
 * call; `out_scene` must be a valid pointer. On success the handle must be
 * released with [`ps_scene_free`].
 */
enum PsStatus ps_scene_parse(const char *json, struct PsScene **out_scene);

/**
 * Releases a scene handle; NULL is a no-op.
 *
 * # Safety
 * `scene` must be a pointer returned by [`ps_scene_parse`], not yet freed.
 */
void ps_scene_free(struct PsScene *scene);

/**
 * Runs one command against a parsed scene. The canonical report JSON is
 * returned through `out_report_json`; commands that produce an SVG (trace,
 * render) also fill `out_svg` when it is non-NULL. Both strings are released
 * with [`ps_string_free`].
 *
 * # Safety
 * `scene` must be a live handle from [`ps_scene_parse`]; `command` a
 * NUL-terminated string; `out_report_json` a valid pointer; `options` and
 * `out_svg` may be NULL.
 */
enum PsStatus ps_run(const struct PsScene *scene,
                     const char *command,
                     const struct PsRunOptions *options,
                     char **out_report_json,
                     char **out_svg);

/**
 * Releases a string returned by this library; NULL is a no-op.
 *
 * # Safety
 * `text` must originate from this library and not be freed twice.
 */
void ps_string_free(char *text);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* POLYSCAT_H */
