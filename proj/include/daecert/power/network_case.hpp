#pragma once

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "daecert/core/matrix.hpp"

namespace daecert::power {

using Complex = std::complex<double>;

/// A computation on valid data did not succeed (divergence, infeasible
/// synthesis, singular Jacobian).
class PowerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Removing a branch would split the network.
class ConnectivityError : public InputError {
 public:
  using InputError::InputError;
};

enum class BusType { kPQ, kPV, kSlack };

/// Loads and shunts in per unit on the case base.
struct Bus {
  int id = 0;
  BusType type = BusType::kPQ;
  double v_set = 1.0;
  double p_load = 0.0;
  double q_load = 0.0;
  double g_shunt = 0.0;
  double b_shunt = 0.0;
};

/// Pi model with an off-nominal tap on the `from` side.
struct Branch {
  int id = 0;
  int from = 0;
  int to = 0;
  double r = 0.0;
  double x = 0.0;
  double b = 0.0;
  double tap = 1.0;
  Complex series_admittance() const { return 1.0 / Complex(r, x); }
};

struct Generator {
  int bus = 0;
  double p_gen = 0.0;  // per unit
  double h = 0.0;      // inertia [s]
  double d = 0.0;      // damping [pu]
  double x_d = 0.0;    // transient reactance [pu]
};

struct NetworkCase {
  std::string name;
  double base_mva = 100.0;
  /// Ω of the swing equations [rad/s].
  double omega = 0.0;
  std::vector<Bus> buses;
  std::vector<Branch> branches;
  std::vector<Generator> generators;

  int bus_index(int id) const;
  int branch_index(int id) const;
  int n_gen() const { return static_cast<int>(generators.size()); }
  int n_load() const { return static_cast<int>(buses.size() - generators.size()); }

  /// Bus indices in model order: generator buses in generator order, then
  /// the remaining buses in file order.
  std::vector<int> model_order() const;

  /// Throws InputError on duplicate ids, unknown references, non-positive
  /// H or X_d, a slack count other than one, or a disconnected graph.
  void check() const;
};

/// Reads case.json and the three CSV tables it names.  `path` may be the
/// case.json file or its directory.
NetworkCase load_case(const std::string& path);

/// True when the bus graph stays connected with `skip_branch` removed.
bool is_connected(const NetworkCase& c, std::optional<int> skip_branch = std::nullopt);

/// Bus admittance matrix in file bus order: branches (with charging and
/// taps) and fixed shunts, no loads.
ComplexMatrix admittance(const NetworkCase& c, std::optional<int> skip_branch = std::nullopt);

/// Four-entry stamp of one branch, added at the branch's bus indices.
void stamp_branch(const NetworkCase& c, const Branch& br, ComplexMatrix& y);

}  // namespace daecert::power
