#ifndef AXY_H
#define AXY_H

/*
 * C surface of the pulse-sequence design and NV sensor simulation library.
 * Every function returns AXY_OK or one of the error codes below; the
 * message for the most recent failure on the calling thread is available
 * through axy_last_error.  Objects come back through opaque handles that
 * the caller frees with the matching *_free function.  Functions returning
 * text allocate it with malloc; release it with axy_free_text.
 */

#ifdef __cplusplus
extern "C" {
#endif

/* Error codes; the bundled CLI uses the same numbers as exit codes. */
#define AXY_OK 0
#define AXY_ERR_CONFIG 2      /* bad config text, arguments or files */
#define AXY_ERR_INFEASIBLE 3  /* timing target outside the solvable range */
#define AXY_ERR_CAPACITY 4    /* joint simulation beyond the configured size */

typedef struct axy_bath axy_bath;
typedef struct axy_spectrum axy_spectrum;

/* Copies the last error message on this thread into buffer (always
 * 0-terminated, truncated to capacity); returns the full message length. */
int axy_last_error(char* buffer, int capacity);

void axy_free_text(char* text);

/* ---- pulse timing design ---------------------------------------------- */

/* Five composite pulse positions (fractions of the period, first half) with
 * the first modulation harmonic tuned to f1.  |f1| below 4/pi is necessary
 * but the symmetric construction narrows the range further; out-of-range
 * targets return AXY_ERR_INFEASIBLE. */
int axy_design_first_harmonic(double f1, double x_out[5]);

/* Same with the third harmonic tuned to f3 and the first harmonic zero. */
int axy_design_third_harmonic(double f3, double x_out[5]);

/* Modulation Fourier coefficients f_1..f_k_max for the given positions. */
int axy_fourier_coefficients(const double x[5], int k_max, double* f_out);

/* ---- nuclear spin bath ------------------------------------------------- */

/* Random carbon-13 placement on the diamond lattice inside radius_nm of the
 * sensor, excluding the vacancy region. */
int axy_bath_generate(unsigned long long seed, double radius_nm,
                      double abundance, double bz_gauss, axy_bath** out);
int axy_bath_load(const char* path, axy_bath** out);
int axy_bath_save(const axy_bath* bath, const char* path);
int axy_bath_count(const axy_bath* bath, int* out);
/* Sampling metadata stored with the bath; any output pointer may be null. */
int axy_bath_info(const axy_bath* bath, double* bz_gauss, double* radius_nm,
                  double* abundance, unsigned long long* seed);
int axy_bath_spin(const axy_bath* bath, int index, double pos_nm[3],
                  double hyperfine_mhz[3]);
/* Regroups the bath into dipolar-coupled clusters of at most max_size. */
int axy_bath_cluster(axy_bath* bath, int max_size);
void axy_bath_free(axy_bath* bath);

/* ---- resonance sweeps --------------------------------------------------- */

/* Runs a frequency sweep described by flat key = value config text (same
 * schema as the CLI sweep config; see the repository README).  All
 * randomness derives from seed; the result is byte-identical for any
 * thread count. */
int axy_sweep_run(const char* config_text, const axy_bath* bath,
                  unsigned long long seed, int threads, axy_spectrum** out);
int axy_spectrum_size(const axy_spectrum* spectrum, int* out);
int axy_spectrum_point(const axy_spectrum* spectrum, int index,
                       double* freq_mhz, double* tau_us, double* probability);
/* CSV with header freq_MHz,tau_us,probability at 17 significant digits. */
int axy_spectrum_csv(const axy_spectrum* spectrum, char** text_out);
/* Deterministic JSON run manifest echoing the config, seed, schedule label
 * and the CSV content hash. */
int axy_spectrum_manifest(const axy_spectrum* spectrum,
                          const char* config_text, unsigned long long seed,
                          char** json_out);
int axy_spectrum_load_csv(const char* path, axy_spectrum** out);
void axy_spectrum_free(axy_spectrum* spectrum);

/* Mean absolute probability difference over the shared grid, restricted to
 * [fmin_mhz, fmax_mhz] unless fmin_mhz > fmax_mhz (then the whole grid). */
int axy_spectrum_deviation(const axy_spectrum* a, const axy_spectrum* b,
                           double fmin_mhz, double fmax_mhz, double* out);

/* Dip detection and one-to-one assignment against the bath's predicted
 * resonances; the report comes back as JSON text. */
int axy_detect_peaks(const axy_spectrum* spectrum, const axy_bath* bath,
                     int k_dd, int ms, double prominence, char** json_out);

/* ---- pulse error analysis ---------------------------------------------- */

/* Fits how fast the sequence error shrinks with the control-error scale;
 * config schema: kind, f1|f3|timings.*, tau_us, gap_phase_rad, order,
 * delta_tilde, epsilon_tilde, rabi_mhz, eta.*.  JSON result holds slope,
 * degenerate flag and the per-eta distances. */
int axy_order_scaling(const char* config_text, char** json_out);

/* ---- schedules ---------------------------------------------------------- */

/* Pulse table CSV (index,center_time_us,phase_rad,duration_us) for the
 * schedule described by the config text, preceded by one # summary line. */
int axy_schedule_dump(const char* config_text, char** csv_out);

#ifdef __cplusplus
}
#endif

#endif /* AXY_H */
