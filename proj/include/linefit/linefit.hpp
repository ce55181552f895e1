#pragma once

#include "linefit/error.hpp"
#include "linefit/geometry.hpp"
#include "linefit/hull.hpp"
#include "linefit/io.hpp"
#include "linefit/l1.hpp"
#include "linefit/l2.hpp"
#include "linefit/linf.hpp"
#include "linefit/lp.hpp"
#include "linefit/oracle.hpp"
#include "linefit/report.hpp"
#include "linefit/svg.hpp"
