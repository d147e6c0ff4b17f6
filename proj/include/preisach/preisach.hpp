#ifndef PREISACH_PREISACH_HPP
#define PREISACH_PREISACH_HPP

#include "preisach/classical.hpp"
#include "preisach/error.hpp"
#include "preisach/generalized.hpp"
#include "preisach/hysteron.hpp"
#include "preisach/loop.hpp"
#include "preisach/memory.hpp"
#include "preisach/signal.hpp"
#include "preisach/summation.hpp"
#include "preisach/verify.hpp"

#endif // PREISACH_PREISACH_HPP
