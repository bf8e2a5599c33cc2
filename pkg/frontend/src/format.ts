/** Small display helpers shared by the table and the what-if panel. */

export function formatZ(value: number): string {
  return (value >= 0 ? "+" : "") + value.toFixed(3);
}

export function formatRaw(value: number): string {
  return value.toFixed(1);
}

/** "z +0.861 · raw 58.3", or just the z part without normalization. */
export function formatDual(z: number, raw: number, hasNormalization: boolean): string {
  const zPart = `z ${formatZ(z)}`;
  return hasNormalization ? `${zPart} · raw ${formatRaw(raw)}` : zPart;
}

export function escapeHtml(value: unknown): string {
  return String(value ?? "")
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}
