#pragma once

#include <algorithm>
#include <cstddef>
#include <future>
#include <thread>
#include <type_traits>
#include <vector>

namespace qpo {

/// Applies f to every element on up to hardware_concurrency threads and
/// returns the results in input order. f must be safe to call concurrently.
template <class T, class F>
auto parallel_map(const std::vector<T>& items, F f) -> std::vector<std::invoke_result_t<F&, const T&>>
{
    using R = std::invoke_result_t<F&, const T&>;
    const std::size_t workers = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    std::vector<R> out;
    out.reserve(items.size());
    for (std::size_t begin = 0; begin < items.size(); begin += workers) {
        const std::size_t end = std::min(items.size(), begin + workers);
        std::vector<std::future<R>> batch;
        for (std::size_t i = begin; i < end; ++i)
            batch.push_back(std::async(std::launch::async, [&f, &items, i] { return f(items[i]); }));
        for (auto& fut : batch) out.push_back(fut.get());
    }
    return out;
}

}  // namespace qpo
