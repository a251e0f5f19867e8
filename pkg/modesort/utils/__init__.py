from .serialization import (
    read_comb_json,
    read_envelope_csv,
    read_json,
    read_mask_csv,
    read_mask_json,
    read_mode_set,
    read_table,
    write_comb_json,
    write_envelope_csv,
    write_json,
    write_mask_csv,
    write_mask_json,
    write_matrix_csv,
    write_mode_set,
    write_table,
    write_text,
)

__all__ = [
    "write_envelope_csv",
    "read_envelope_csv",
    "write_mode_set",
    "read_mode_set",
    "write_comb_json",
    "read_comb_json",
    "write_mask_csv",
    "read_mask_csv",
    "write_mask_json",
    "read_mask_json",
    "write_matrix_csv",
    "write_table",
    "read_table",
    "write_json",
    "read_json",
    "write_text",
]
