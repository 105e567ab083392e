#ifndef TORVOL_TORVOL_HPP_
#define TORVOL_TORVOL_HPP_

#include "torvol/rational.hpp"
#include "torvol/chain.hpp"
#include "torvol/chain_io.hpp"
#include "torvol/exact_lp.hpp"
#include "torvol/filling.hpp"
#include "torvol/constructions.hpp"
#include "torvol/verify.hpp"
#include "torvol/sl2z.hpp"
#include "torvol/smith.hpp"
#include "torvol/layered.hpp"

#endif  // TORVOL_TORVOL_HPP_
