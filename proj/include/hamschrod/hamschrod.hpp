#pragma once

#include "hamschrod/types.hpp"
#include "hamschrod/closed_form.hpp"
#include "hamschrod/differentiation.hpp"
#include "hamschrod/operator_expr.hpp"
#include "hamschrod/problem.hpp"
#include "hamschrod/classical.hpp"
#include "hamschrod/schrodinger.hpp"
#include "hamschrod/ham.hpp"
#include "hamschrod/convergence.hpp"
#include "hamschrod/builtins.hpp"
#include "hamschrod/io.hpp"
#include "hamschrod/config.hpp"
#include "hamschrod/runner.hpp"
