#ifndef FLUXSIM_ERRORS_HPP
#define FLUXSIM_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace fluxsim {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InputError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct DegenerateCircuitError : Error {
  using Error::Error;
};

// Carries the spectra from the last two basis sizes tried.
struct ConvergenceError : Error {
  ConvergenceError(std::string msg, std::vector<double> last,
                   std::vector<double> refined)
      : Error(std::move(msg)),
        last_energies(std::move(last)),
        refined_energies(std::move(refined)) {}
  std::vector<double> last_energies;
  std::vector<double> refined_energies;
};

struct LabelError : Error {
  using Error::Error;
};

struct IdentificationError : Error {
  using Error::Error;
};

struct DegenerateSteadyStateError : Error {
  DegenerateSteadyStateError(std::string msg, int dim)
      : Error(std::move(msg)), kernel_dimension(dim) {}
  int kernel_dimension = 0;
};

}  // namespace fluxsim

#endif
