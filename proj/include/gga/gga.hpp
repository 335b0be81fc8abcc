#pragma once

#include "gga/clusters.hpp"
#include "gga/embedding.hpp"
#include "gga/error.hpp"
#include "gga/evolution.hpp"
#include "gga/finite_oracle.hpp"
#include "gga/genetic.hpp"
#include "gga/lattice.hpp"
#include "gga/model.hpp"
#include "gga/numeric.hpp"
#include "gga/potential.hpp"
#include "gga/sampling.hpp"
#include "gga/tau.hpp"
#include "gga/transforms.hpp"
