"""Verify the built-in zero-error schemes and print their tables."""
from cifc.channel import builtin
from cifc.schemes import SCHEMES, emit_table, table_to_csv, verify_zero_error

for name, (make, channel_name) in sorted(SCHEMES.items()):
    ch, s = builtin(channel_name), make()
    rep = verify_zero_error(ch, s)
    print(f"{name} on {channel_name}: ok={rep.ok} rates={rep.rates}")
    print(table_to_csv(emit_table(ch, s)))
