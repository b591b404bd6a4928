#ifndef CRNLYAP_CRNLYAP_HPP
#define CRNLYAP_CRNLYAP_HPP

#include "crnlyap/composite.hpp"
#include "crnlyap/dim1.hpp"
#include "crnlyap/equilibrium.hpp"
#include "crnlyap/error.hpp"
#include "crnlyap/gibbs.hpp"
#include "crnlyap/lyapunov.hpp"
#include "crnlyap/netparse.hpp"
#include "crnlyap/network.hpp"
#include "crnlyap/numerics.hpp"
#include "crnlyap/parallel.hpp"
#include "crnlyap/pde.hpp"
#include "crnlyap/random.hpp"
#include "crnlyap/sim/monitor.hpp"
#include "crnlyap/sim/ode.hpp"
#include "crnlyap/sim/ssa.hpp"
#include "crnlyap/structure.hpp"
#include "crnlyap/verify.hpp"

#endif  // CRNLYAP_CRNLYAP_HPP
