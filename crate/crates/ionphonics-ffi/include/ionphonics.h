#ifndef IONPHONICS_H
#define IONPHONICS_H

/* Generated by cbindgen from the ionphonics-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible call.
 */
typedef enum {
  IPN_STATUS_OK = 0,
  IPN_STATUS_NULL_ARGUMENT = 1,
  IPN_STATUS_INVALID_ARGUMENT = 2,
  IPN_STATUS_NUMERICAL_ERROR = 3,
  IPN_STATUS_BUFFER_TOO_SMALL = 4,
  IPN_STATUS_PANIC = 5,
} IpnStatus;

/**
 * Solved chain model: geometry, effective frequencies, couplings.
 */
typedef struct IpnChain IpnChain;

/**
 * Trapping-frequency schedule handle.
 */
typedef struct IpnSchedule IpnSchedule;

/**
 * Gaussian state handle.
 */
typedef struct IpnState IpnState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Last error message of the current thread (empty when no error occurred).
 * The pointer stays valid until the next failing call on this thread.
 */
const char *ipn_last_error_message(void);

/**
 * Build a chain of `n` ions with the given bare radial frequencies
 * (units of the longitudinal frequency).
 */
IpnStatus ipn_chain_new(const double *bare_frequencies, uintptr_t n, IpnChain **out);

void ipn_chain_free(IpnChain *chain);

uintptr_t ipn_chain_ions(const IpnChain *chain);

/**
 * Effective radial frequencies; `len` must be at least the ion count.
 */
IpnStatus ipn_chain_effective_frequencies(const IpnChain *chain, double *out, uintptr_t len);

/**
 * Ground state of the chain Hamiltonian.
 */
IpnStatus ipn_chain_ground_state(const IpnChain *chain, IpnState **out);

void ipn_state_free(IpnState *state);

uintptr_t ipn_state_modes(const IpnState *state);

/**
 * Copy the 2n x 2n covariance matrix (row major, xxpp ordering).
 */
IpnStatus ipn_state_covariance(const IpnState *state, double *out, uintptr_t len);

/**
 * Logarithmic negativity across the bipartition whose party A is the given
 * list of 0-based mode indices.
 */
IpnStatus ipn_state_log_negativity(const IpnState *state,
                                   const uintptr_t *party_a,
                                   uintptr_t party_len,
                                   double *out);

/**
 * Parse a schedule from its line-oriented text format.
 */
IpnStatus ipn_schedule_parse(const char *text, IpnSchedule **out);

void ipn_schedule_free(IpnSchedule *schedule);

uintptr_t ipn_schedule_instructions(const IpnSchedule *schedule);

/**
 * Print the schedule into a caller-provided buffer (NUL terminated).
 * `written` receives the text length excluding the terminator.
 */
IpnStatus ipn_schedule_print(const IpnSchedule *schedule,
                             char *buf,
                             uintptr_t capacity,
                             uintptr_t *written);

/**
 * Evolve a state through a schedule (closed dynamics, schedule frame).
 */
IpnStatus ipn_schedule_evolve(const IpnSchedule *schedule, const IpnState *state, IpnState **out);

/**
 * Synthesize a two-mode rotation (beam splitter) between two 0-based ions
 * on a ladder of `n_ions` with the given effective-frequency step.
 */
IpnStatus ipn_compile_beam_splitter(uintptr_t n_ions,
                                    uintptr_t ion_a,
                                    uintptr_t ion_b,
                                    double theta,
                                    double ladder_step,
                                    IpnSchedule **out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* IONPHONICS_H */
