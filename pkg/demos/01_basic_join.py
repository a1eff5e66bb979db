"""Join two small tables and check the result against a brute-force join.

Tables are (join_key, payload) rows of unsigned 64-bit integers.  Keys may
repeat on both sides; the join emits one (payload1, payload2) pair per
matching key combination, so duplicate keys multiply.
"""

import numpy as np

from oblivjoin import nested_loop_join, oblivious_join, sorted_pairs

# orders:   (customer_id, order_id)        customers: (customer_id, zip)
orders = np.array([(7, 100), (3, 101), (7, 102), (9, 103)], np.uint64)
customers = np.array([(3, 60614), (7, 94110), (4, 10001)], np.uint64)

result = oblivious_join(orders, customers)
print(f"n1={result.n1} n2={result.n2} -> m={result.m} matches")
for d1, d2 in result.rows():
    print(f"  order {d1} ships to zip {d2}")

# customer 7 has two orders -> two pairs; customers 9 and 4 match nothing
expected = sorted_pairs(nested_loop_join(orders, customers))
assert np.array_equal(sorted_pairs(result.pairs), expected)
print("matches the nested-loop oracle")
