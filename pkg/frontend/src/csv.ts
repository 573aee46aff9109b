/** Label-log CSV assembly, byte-compatible with the service export. */

export interface LabelEntry {
  id: string;
  label: string;
}

export function buildCsv(entries: readonly LabelEntry[]): string {
  let out = "id,label\n";
  for (const entry of entries) out += `${entry.id},${entry.label}\n`;
  return out;
}
