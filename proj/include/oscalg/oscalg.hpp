#ifndef OSCALG_OSCALG_HPP
#define OSCALG_OSCALG_HPP

#include "oscalg/scalar.hpp"
#include "oscalg/small_matrix.hpp"
#include "oscalg/fock.hpp"
#include "oscalg/lagrangian.hpp"
#include "oscalg/dynamics.hpp"
#include "oscalg/js_algebras.hpp"

#endif  // OSCALG_OSCALG_HPP
