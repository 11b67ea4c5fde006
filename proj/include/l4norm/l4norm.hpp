#ifndef L4NORM_L4NORM_HPP
#define L4NORM_L4NORM_HPP

#include "l4norm/config.hpp"
#include "l4norm/dalembert.hpp"
#include "l4norm/equilibria.hpp"
#include "l4norm/errors.hpp"
#include "l4norm/h3_closed.hpp"
#include "l4norm/model.hpp"
#include "l4norm/normal_modes.hpp"
#include "l4norm/poly.hpp"
#include "l4norm/report.hpp"
#include "l4norm/scan.hpp"
#include "l4norm/second_order.hpp"
#include "l4norm/tables.hpp"
#include "l4norm/taylor.hpp"
#include "l4norm/verify.hpp"

#endif  // L4NORM_L4NORM_HPP
