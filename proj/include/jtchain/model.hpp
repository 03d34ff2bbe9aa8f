#pragma once

#include <string>

#include "jtchain/errors.hpp"

namespace jt {

enum class Boundary { Periodic, Open, Custom };

std::string to_string(Boundary b);

/// Physical couplings of the spin-boson chain, all in one energy unit.
/// The default convention sets omega0 = 1. `omega0` is the lowest
/// collective mode energy under periodic boundaries; local oscillator
/// energies are parametrized as omega0 + 2t so that the bottom of the
/// dispersion stays at omega0 for every hopping t.
struct ModelParams {
    int n_sites = 1;          // N
    double omega0 = 1.0;      // lowest PBC mode energy, > 0
    double t = 0.0;           // nearest-neighbour hopping, >= 0
    double g = 0.0;           // spin-boson coupling, >= 0
    double Omega = 0.0;       // transverse field, >= 0
    Boundary boundary = Boundary::Periodic;

    void validate() const {
        if (n_sites < 1)
            throw PhysicsError("n_sites must be >= 1, got " + std::to_string(n_sites));
        if (!(omega0 > 0.0))
            throw NonPositiveSpectrum("omega0 must be > 0, got " + std::to_string(omega0));
        if (t < 0.0)
            throw PhysicsError("hopping t must be >= 0, got " + std::to_string(t));
        if (g < 0.0)
            throw PhysicsError("coupling g must be >= 0, got " + std::to_string(g));
        if (Omega < 0.0)
            throw PhysicsError("transverse field Omega must be >= 0, got " + std::to_string(Omega));
    }
};

} // namespace jt
